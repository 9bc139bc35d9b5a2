//! Empirical Gromov hyperbolicity: four-point defects, thin triangles,
//! causal quasi-geodesics and thinness of causal bigons.

mod triangles;

pub use triangles::{
    causal_quasigeodesic, causal_thinness, lightlike_bigon, thin_triangle_defect, verify_quasigeodesic,
    witness_family, QuasiGeodesicCheck, QuasiGeodesicTriangle, WitnessKind,
};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{exit_pair, DomainOracle};
use crate::error::{Error, Result};
use crate::minkowski::Event;
use crate::sampling::rng;

/// `(x, y)_w = (d(w, x) + d(w, y) - d(x, y)) / 2`.
pub fn gromov_product<F>(d: &F, x: &Event, y: &Event, w: &Event) -> Result<f64>
where
    F: Fn(&Event, &Event) -> Result<f64>,
{
    Ok(0.5 * (d(w, x)? + d(w, y)? - d(x, y)?))
}

/// Symmetric matrix of pairwise distances between sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    points: Vec<Event>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Evaluates `d` on every unordered pair in parallel.
    pub fn from_fn<F>(points: Vec<Event>, d: F) -> Result<Self>
    where
        F: Fn(&Event, &Event) -> Result<f64> + Sync,
    {
        let n = points.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let vals: Result<Vec<f64>> = pairs.par_iter().map(|&(i, j)| d(&points[i], &points[j])).collect();
        let vals = vals?;
        let mut values = vec![0.0; n * n];
        for (&(i, j), v) in pairs.iter().zip(vals) {
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
        Ok(DistanceMatrix { points, values })
    }

    /// Wraps precomputed rows; the matrix is symmetrized by the smaller entry.
    pub fn from_rows(points: Vec<Event>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows.len(),
            });
        }
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = if i == j { 0.0 } else { rows[i][j].min(rows[j][i]) };
            }
        }
        Ok(DistanceMatrix { points, values })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Event] {
        &self.points
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.points.len() + j]
    }
}

/// Four-point defect of a quadruple: half the gap between the two largest
/// of the three pair sums. Invariant under relabeling.
pub fn quadruple_defect(d: &DistanceMatrix, q: [usize; 4]) -> f64 {
    let [x, y, z, w] = q;
    let mut s = [
        d.get(x, y) + d.get(z, w),
        d.get(x, z) + d.get(y, w),
        d.get(x, w) + d.get(y, z),
    ];
    s.sort_by(f64::total_cmp);
    (0.5 * (s[2] - s[1])).max(0.0)
}

/// The same defect through Gromov products based at `w`, maximized over the
/// three ways of pairing up `x, y, z`.
pub fn quadruple_defect_products(d: &DistanceMatrix, q: [usize; 4]) -> f64 {
    let [x, y, z, w] = q;
    let gp = |a: usize, b: usize| 0.5 * (d.get(w, a) + d.get(w, b) - d.get(a, b));
    let mut best: f64 = 0.0;
    for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
        best = best.max(gp(a, b).min(gp(b, c)) - gp(a, c));
    }
    best
}

/// Growth classification of a per-scale series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    Bounded,
    Growing,
    Inconclusive,
}

impl GrowthVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            GrowthVerdict::Bounded => "bounded",
            GrowthVerdict::Growing => "growing",
            GrowthVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Ratio thresholds separating bounded from growing series.
pub const BOUNDED_RATIO: f64 = 1.5;
pub const GROWING_RATIO: f64 = 2.0;

/// Result of a four-point hyperbolicity estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicityReport {
    pub delta: f64,
    pub quadruples: usize,
    pub worst: [Event; 4],
    /// `(scale, delta)` per scale; a single entry for an unscaled sample.
    pub series: Vec<(f64, f64)>,
}

impl HyperbolicityReport {
    /// Last over first entry of the series.
    pub fn ratio(&self) -> f64 {
        match (self.series.first(), self.series.last()) {
            (Some(a), Some(b)) if a.1 > 0.0 => b.1 / a.1,
            (Some(_), Some(b)) if b.1 > 0.0 => f64::INFINITY,
            _ => 1.0,
        }
    }

    pub fn verdict(&self) -> GrowthVerdict {
        let r = self.ratio();
        if r < BOUNDED_RATIO {
            GrowthVerdict::Bounded
        } else if r > GROWING_RATIO {
            GrowthVerdict::Growing
        } else {
            GrowthVerdict::Inconclusive
        }
    }
}

/// How quadruples are drawn from a distance matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadrupleSampler {
    pub quadruples: usize,
    pub seed: u64,
}

impl Default for QuadrupleSampler {
    fn default() -> Self {
        QuadrupleSampler {
            quadruples: 2000,
            seed: 42,
        }
    }
}

/// Largest four-point defect over sampled quadruples of distinct points.
///
/// With at most `quadruples` distinct quadruples available, all are visited.
pub fn four_point_delta(d: &DistanceMatrix, sampler: &QuadrupleSampler) -> Result<HyperbolicityReport> {
    let n = d.len();
    let distinct = {
        let mut pts: Vec<&Event> = d.points().iter().collect();
        pts.sort_by(|a, b| a.0.iter().zip(&b.0).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        pts.dedup();
        pts.len()
    };
    if n < 4 || distinct < 4 {
        if n >= 1 && distinct <= 1 {
            // a sample of identical points has no defect
            let p = d.points()[0].clone();
            return Ok(HyperbolicityReport {
                delta: 0.0,
                quadruples: 0,
                worst: [p.clone(), p.clone(), p.clone(), p],
                series: vec![(1.0, 0.0)],
            });
        }
        return Err(Error::DegenerateSample(format!("need 4 distinct points, got {distinct}")));
    }
    let total = n * (n - 1) * (n - 2) * (n - 3) / 24;
    let quads: Vec<[usize; 4]> = if total <= sampler.quadruples {
        let mut all = Vec::with_capacity(total);
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for e in c + 1..n {
                        all.push([a, b, c, e]);
                    }
                }
            }
        }
        all
    } else {
        let mut r = rng(sampler.seed);
        (0..sampler.quadruples)
            .map(|_| {
                let mut q = [0usize; 4];
                let mut k = 0;
                while k < 4 {
                    let c = r.gen_range(0..n);
                    if !q[..k].contains(&c) {
                        q[k] = c;
                        k += 1;
                    }
                }
                q
            })
            .collect()
    };
    let mut best = (0.0, quads[0]);
    for q in &quads {
        let v = quadruple_defect(d, *q);
        if v > best.0 {
            best = (v, *q);
        }
    }
    let pts = d.points();
    Ok(HyperbolicityReport {
        delta: best.0,
        quadruples: quads.len(),
        worst: best.1.map(|i| pts[i].clone()),
        series: vec![(1.0, best.0)],
    })
}

/// Depth window of [`scale_sample`] at scale 1, in logit units.
pub const BASE_DEPTH: f64 = 4.0;
/// Growth of the depth window per doubling of the scale.
pub const DEPTH_PER_DOUBLING: f64 = 2.0;

/// Sample of `count` members spread over the scale `s >= 1`, with the depth
/// window `L = BASE_DEPTH + DEPTH_PER_DOUBLING log2 s`.
///
/// - Bounded domains: in the frame `u = t + p_1`, `w = t - p_1`, `p_2, ..`
///   every coordinate is placed at the logistic fraction `1/(1 + e^-l)` of the
///   domain's extent along it, `l` uniform in `[-L, L]`, and points outside are
///   rejected.
/// - Future complete domains: a spatial offset uniform in the ball of radius
///   `scale() e^L` around the center, at height `scale() e^l` above the
///   boundary point straight below it.
/// - Other domains: a spatial ball of radius `scale() s / 2` around the
///   center, with the time coordinate spread over the middle half of the
///   vertical chord through each point.
///
/// Each point draws from its own random stream and the draws are scaled by
/// `L` or `s`, so the samples at different scales are dilations of one
/// configuration as far as rejection allows.
pub fn scale_sample<D: DomainOracle + ?Sized>(omega: &D, s: f64, count: usize, seed: u64) -> Result<Vec<Event>> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Error::DegenerateSample(format!("scale must be >= 1, got {s}")));
    }
    let n = omega.dim();
    let c = omega.center();
    let flags = omega.flags();
    let l = BASE_DEPTH + DEPTH_PER_DOUBLING * s.log2();
    let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
    let mut up = vec![0.0; n + 1];
    up[0] = 1.0;
    // covectors of the frame coordinates
    let frame: Vec<Vec<f64>> = (0..=n)
        .map(|i| {
            let mut m = vec![0.0; n + 1];
            match i {
                0 => {
                    m[0] = 1.0;
                    m[1] = 1.0;
                }
                1 => {
                    m[0] = 1.0;
                    m[1] = -1.0;
                }
                _ => m[i] = 1.0,
            }
            m
        })
        .collect();
    let extents: Vec<(f64, f64)> = frame.iter().map(|m| omega.support(m)).collect();
    if flags.bounded && extents.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && hi > lo)) {
        return Err(Error::NotApplicable("bounded domain without finite support".into()));
    }
    let unit_ball = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        let mut p = vec![0.0; n];
        loop {
            p.iter_mut().for_each(|q| *q = r.gen_range(-1.0..1.0));
            if p.iter().map(|q| q * q).sum::<f64>() <= 1.0 {
                return p;
            }
        }
    };
    let shifted = |p: &[f64], radius: f64| -> Vec<f64> { c.p().iter().zip(p).map(|(a, b)| a + radius * b).collect() };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        // one stream per point, so that the same configuration is dilated across scales
        let mut r = rng(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut found = None;
        for _ in 0..1000 {
            let x = if flags.bounded {
                let f: Vec<f64> = extents
                    .iter()
                    .map(|&(lo, hi)| lo + (hi - lo) * sig(l * r.gen_range(-1.0..1.0)))
                    .collect();
                let mut e = f.clone();
                e[0] = 0.5 * (f[0] + f[1]);
                e[1] = 0.5 * (f[0] - f[1]);
                Event(e.into_iter().collect())
            } else if flags.future_complete {
                let p = shifted(&unit_ball(&mut r), omega.scale() * l.exp());
                let h = omega.scale() * (l * r.gen_range(-1.0..1.0)).exp();
                // boundaries of future complete domains are 1-Lipschitz graphs
                let lift = p.iter().zip(c.p()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                let base = Event::new(c.t() + lift, &p);
                let Some(below) = exit_pair(omega, &base, &up).0 else {
                    continue;
                };
                Event::new(base.t() - below + h, &p)
            } else {
                let base = Event::new(c.t(), &shifted(&unit_ball(&mut r), 0.5 * omega.scale() * s));
                let v = r.gen_range(-0.5..0.5);
                let (past, fut) = exit_pair(omega, &base, &up);
                let (lo, hi) = (-past.unwrap_or(omega.scale()), fut.unwrap_or(omega.scale()));
                Event::new(base.t() + 0.5 * (lo + hi) + 0.5 * (hi - lo) * v, base.p())
            };
            if omega.contains(&x) {
                found = Some(x);
                break;
            }
        }
        out.push(found.ok_or_else(|| Error::DegenerateSample("rejection sampling stalled".into()))?);
    }
    Ok(out)
}

/// Runs [`four_point_delta`] per scale and merges the results into one series.
pub fn hyperbolicity_series<F>(scales: &[f64], sampler: &QuadrupleSampler, mut matrix_at: F) -> Result<HyperbolicityReport>
where
    F: FnMut(f64) -> Result<DistanceMatrix>,
{
    let mut out: Option<HyperbolicityReport> = None;
    let mut series = Vec::with_capacity(scales.len());
    let mut count = 0;
    for &s in scales {
        let m = matrix_at(s)?;
        let r = four_point_delta(&m, sampler)?;
        series.push((s, r.delta));
        count += r.quadruples;
        if out.as_ref().map_or(true, |o| r.delta > o.delta) {
            out = Some(r);
        }
    }
    let mut out = out.ok_or_else(|| Error::DegenerateSample("no scales".into()))?;
    out.series = series;
    out.quadruples = count;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_points(n: usize) -> Vec<Event> {
        (0..n).map(|i| Event::new(0.0, &[i as f64])).collect()
    }

    #[test]
    fn gromov_product_examples() {
        let d = |a: &Event, b: &Event| Ok((a[1] - b[1]).abs());
        let (x, w) = (Event::new(0.0, &[3.0]), Event::new(0.0, &[0.0]));
        assert_eq!(gromov_product(&d, &x, &x, &w).unwrap(), 3.0);
        assert_eq!(gromov_product(&d, &x, &w, &x).unwrap(), 0.0);
        // tripod: d(w,x) = d(w,y) = 3, d(x,y) = 6
        let tri = |a: &Event, b: &Event| -> Result<f64> {
            let key = |e: &Event| e[1] as i32;
            Ok(match (key(a), key(b)) {
                (p, q) if p == q => 0.0,
                (0, _) | (_, 0) => 3.0,
                _ => 6.0,
            })
        };
        let y = Event::new(0.0, &[5.0]);
        assert_eq!(gromov_product(&tri, &x, &y, &w).unwrap(), 0.0);
    }

    #[test]
    fn trees_and_lines_have_no_defect() {
        let m = DistanceMatrix::from_fn(line_points(7), |a, b| Ok((a[1] - b[1]).abs())).unwrap();
        let r = four_point_delta(&m, &QuadrupleSampler::default()).unwrap();
        assert_eq!(r.delta, 0.0);
    }

    #[test]
    fn square_in_the_plane() {
        let pts = vec![
            Event::new(0.0, &[0.0, 0.0]),
            Event::new(0.0, &[1.0, 0.0]),
            Event::new(0.0, &[1.0, 1.0]),
            Event::new(0.0, &[0.0, 1.0]),
        ];
        let m = DistanceMatrix::from_fn(pts, |a, b| Ok(crate::minkowski::wick_distance(a, b))).unwrap();
        let r = four_point_delta(&m, &QuadrupleSampler::default()).unwrap();
        // sums: 2 sqrt 2 for the diagonals against 2 for the sides
        assert!((r.delta - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((quadruple_defect_products(&m, [0, 1, 2, 3]) - r.delta).abs() < 1e-12);
    }

    #[test]
    fn identical_points_give_zero() {
        let p = Event::new(1.0, &[0.0]);
        let m = DistanceMatrix::from_fn(vec![p.clone(); 4], |_, _| Ok(0.0)).unwrap();
        assert_eq!(four_point_delta(&m, &QuadrupleSampler::default()).unwrap().delta, 0.0);
    }
}
