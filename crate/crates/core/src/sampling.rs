//! Deterministic direction sets and seeded point samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::domains::DomainOracle;
use crate::minkowski::Event;

/// Seeded generator used everywhere randomness is needed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Roughly uniform unit vectors in `R^d`.
///
/// `d = 1` gives the two signs, `d = 2` evenly spaced angles, `d = 3` a
/// Fibonacci lattice and higher `d` seeded Gaussian directions.
pub fn sphere_directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    match d {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count.max(2))
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / count.max(2) as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let m = count.max(4);
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut r = rng(0x5eed ^ d as u64);
            let mut out = Vec::with_capacity(count);
            for i in 0..count.max(2 * d) {
                if i < 2 * d {
                    let mut v = vec![0.0; d];
                    v[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
                    out.push(v);
                    continue;
                }
                let v: Vec<f64> = (0..d).map(|_| r.sample(StandardNormal)).collect();
                let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                out.push(v.into_iter().map(|c| c / n).collect());
            }
            out
        }
    }
}

/// Future lightlike directions `(1, u)` with `u` from [`sphere_directions`].
pub fn lightlike_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    sphere_directions(n, count)
        .into_iter()
        .map(|u| {
            let mut v = Vec::with_capacity(n + 1);
            v.push(1.0);
            v.extend(u);
            v
        })
        .collect()
}

/// A point drawn uniformly from the coordinate box `[lo, hi]`.
pub fn uniform_in_box(r: &mut impl Rng, lo: &Event, hi: &Event) -> Event {
    Event(
        lo.0.iter()
            .zip(&hi.0)
            .map(|(a, b)| if b > a { r.gen_range(*a..*b) } else { *a })
            .collect(),
    )
}

/// Rejection sampling of `count` members from the domain's sampling box.
///
/// Points closer than `margin` (Wick) to the boundary are rejected as well.
pub fn sample_members<D: DomainOracle + ?Sized>(
    omega: &D,
    count: usize,
    margin: f64,
    r: &mut impl Rng,
) -> Vec<Event> {
    let (lo, hi) = omega.sampling_box();
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    while out.len() < count && tries < 1000 * count.max(1) {
        tries += 1;
        let x = uniform_in_box(r, &lo, &hi);
        if omega.contains(&x) && (margin <= 0.0 || omega.clearance(&x) > margin) {
            out.push(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        for d in 1..=5 {
            for v in sphere_directions(d, 40) {
                let n: f64 = v.iter().map(|c| c * c).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lightlike_directions_are_null() {
        for v in lightlike_directions(2, 16) {
            let q = crate::minkowski::form(&v, &v, 0.0);
            assert!(q.abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = uniform_in_box(&mut rng(7), &Event::new(0.0, &[0.0]), &Event::new(1.0, &[1.0]));
        let b = uniform_in_box(&mut rng(7), &Event::new(0.0, &[0.0]), &Event::new(1.0, &[1.0]));
        assert_eq!(a, b);
    }
}
