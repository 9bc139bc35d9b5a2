//! Quasi-geodesic triangles, witness families and causal bigons.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::DomainOracle;
use crate::error::{Error, Result};
use crate::metrics::{CausalPath, TimeFunction};
use crate::minkowski::{causally_precedes, classify_raw, CausalKind, Event, Vector};
use crate::sampling::rng;

/// Three polygonal sides `[x, y]`, `[y, z]`, `[z, x]` and the claimed
/// quasi-geodesic constants.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiGeodesicTriangle {
    pub sides: [Vec<Event>; 3],
    pub a: f64,
    pub b: f64,
}

impl QuasiGeodesicTriangle {
    /// Triangle with straight sides through the given corners.
    pub fn straight(x: &Event, y: &Event, z: &Event, per_side: usize, a: f64, b: f64) -> Self {
        QuasiGeodesicTriangle {
            sides: [segment(x, y, per_side), segment(y, z, per_side), segment(z, x, per_side)],
            a,
            b,
        }
    }

    pub fn corners(&self) -> [Event; 3] {
        [self.sides[0][0].clone(), self.sides[1][0].clone(), self.sides[2][0].clone()]
    }
}

fn segment(a: &Event, b: &Event, count: usize) -> Vec<Event> {
    let count = count.max(2);
    (0..count).map(|i| a.lerp(b, i as f64 / (count - 1) as f64)).collect()
}

/// Straight causal segment with vertices at equal steps of the time function.
pub fn causal_quasigeodesic<D: DomainOracle + ?Sized>(
    omega: &D,
    from: &Event,
    to: &Event,
    tau: &TimeFunction,
    vertices: usize,
) -> Result<CausalPath> {
    for p in [from, to] {
        if p.dim() != omega.dim() {
            return Err(Error::DimensionMismatch {
                expected: omega.dim(),
                found: p.dim(),
            });
        }
        if !omega.contains(p) {
            return Err(Error::OutsideDomain);
        }
    }
    if from == to {
        return Ok(CausalPath {
            vertices: vec![from.clone()],
            increments: Vec::new(),
        });
    }
    if !causally_precedes(from, to) {
        return Err(Error::NotCausal);
    }
    let t0 = tau.eval(omega, from)?;
    let t1 = tau.eval(omega, to)?;
    if t1 <= t0 {
        return Err(Error::InvalidTimeFunction("the time function does not increase from `from` to `to`".into()));
    }
    let m = vertices.max(2) - 1;
    let at = |s: f64| from.lerp(to, s);
    let mut out = vec![from.clone()];
    let mut lo = 0.0;
    for k in 1..m {
        let target = t0 + (t1 - t0) * k as f64 / m as f64;
        let (mut a, mut b) = (lo, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if tau.eval(omega, &at(mid))? < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        lo = 0.5 * (a + b);
        out.push(at(lo));
    }
    out.push(to.clone());
    let mut increments = Vec::with_capacity(m);
    let mut prev = t0;
    for v in &out[1..] {
        let t = tau.eval(omega, v)?;
        increments.push(t - prev);
        prev = t;
    }
    Ok(CausalPath {
        vertices: out,
        increments,
    })
}

/// Outcome of checking `|s - s'| / A - B <= d <= A |s - s'| + B` along a path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiGeodesicCheck {
    pub pairs: usize,
    /// Smallest `d - (|ds| / A - B)`.
    pub lower_margin: f64,
    /// Smallest `(A |ds| + B) - d`.
    pub upper_margin: f64,
}

impl QuasiGeodesicCheck {
    pub fn holds(&self) -> bool {
        self.lower_margin >= 0.0 && self.upper_margin >= 0.0
    }
}

/// Checks the quasi-geodesic inequalities on sampled vertex pairs, with the
/// parameter given by the cumulative increments of the path.
pub fn verify_quasigeodesic<F>(path: &CausalPath, d: &F, a: f64, b: f64, pairs: usize, seed: u64) -> Result<QuasiGeodesicCheck>
where
    F: Fn(&Event, &Event) -> Result<f64> + Sync,
{
    let n = path.vertices.len();
    let mut params = vec![0.0; n];
    for i in 1..n {
        params[i] = params[i - 1] + path.increments.get(i - 1).copied().unwrap_or(0.0);
    }
    let all: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let chosen: Vec<(usize, usize)> = if all.len() <= pairs {
        all
    } else {
        let mut r = rng(seed);
        sample(&mut r, all.len(), pairs).into_iter().map(|k| all[k]).collect()
    };
    let vals: Result<Vec<(f64, f64)>> = chosen
        .par_iter()
        .map(|&(i, j)| {
            let ds = (params[j] - params[i]).abs();
            let v = d(&path.vertices[i], &path.vertices[j])?;
            Ok((v - (ds / a - b), (a * ds + b) - v))
        })
        .collect();
    let vals = vals?;
    Ok(QuasiGeodesicCheck {
        pairs: vals.len(),
        lower_margin: vals.iter().map(|v| v.0).fold(f64::INFINITY, f64::min),
        upper_margin: vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min),
    })
}

/// Largest distance from a vertex of one side to the vertices of the other two.
pub fn thin_triangle_defect<F>(d: &F, triangle: &QuasiGeodesicTriangle) -> Result<f64>
where
    F: Fn(&Event, &Event) -> Result<f64> + Sync,
{
    let jobs: Vec<(usize, usize)> = (0..3)
        .flat_map(|s| (0..triangle.sides[s].len()).map(move |v| (s, v)))
        .collect();
    let vals: Result<Vec<f64>> = jobs
        .par_iter()
        .map(|&(s, v)| {
            let p = &triangle.sides[s][v];
            let mut best = f64::INFINITY;
            for (o, side) in triangle.sides.iter().enumerate() {
                if o == s {
                    continue;
                }
                for q in side {
                    best = best.min(if p == q { 0.0 } else { d(p, q)? });
                }
            }
            Ok(best)
        })
        .collect();
    Ok(vals?.into_iter().fold(0.0, f64::max))
}

/// Boundary features with a known family of fat triangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessKind {
    /// A lightlike half-line `at + s dir`, `s >= 0`, on the boundary, with
    /// the domain on its future side.
    LightlikeBoundary { at: Event, dir: Vector },
    /// Two lightlike boundary segments `corner + s first`, `corner + s second`,
    /// `0 <= s <= 1`, meeting at a corner.
    BrokenSegment { corner: Event, first: Vector, second: Vector },
    /// Euclidean triangles of growing size in the slice through the domain's center.
    FlatSlice,
}

fn absent(what: &str) -> Error {
    Error::FeatureAbsent(what.into())
}

fn lightlike(v: &Vector) -> bool {
    !v.is_zero() && classify_raw(&v.0, 0.0).kind == CausalKind::Lightlike
}

/// `q` lies on the boundary with the interior on the side of `inward`.
fn on_boundary<D: DomainOracle + ?Sized>(omega: &D, q: &Event, inward: &Vector) -> bool {
    let eta = 1e-7 * omega.scale().max(1e-300);
    !omega.contains(&q.offset(inward, -eta)) && omega.contains(&q.offset(inward, eta))
}

/// The `k`-th triangle of the family attached to a boundary feature.
///
/// Fails with [`Error::FeatureAbsent`] when ray shooting does not confirm the feature.
pub fn witness_family<D: DomainOracle + ?Sized>(omega: &D, kind: &WitnessKind, k: u32) -> Result<QuasiGeodesicTriangle> {
    const PER_SIDE: usize = 32;
    let n = omega.dim();
    let up = Vector::time_unit(n);
    let scale = 0.5f64.powi(k as i32);
    let tri = match kind {
        WitnessKind::LightlikeBoundary { at, dir } => {
            if at.dim() != n || dir.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: at.dim(),
                });
            }
            if !lightlike(dir) || dir.t() <= 0.0 {
                return Err(absent("the half-line direction must be future lightlike"));
            }
            for s in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
                if !on_boundary(omega, &at.offset(dir, s), &up) {
                    return Err(absent("the half-line is not on the boundary"));
                }
            }
            let x = at.offset(&up, scale);
            let y = x.offset(dir, 1.0);
            let z = x.offset(&up, 2.0 * dir.t());
            QuasiGeodesicTriangle::straight(&x, &y, &z, PER_SIDE, 1.0, 0.0)
        }
        WitnessKind::BrokenSegment { corner, first, second } => {
            if corner.dim() != n || first.dim() != n || second.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: corner.dim(),
                });
            }
            if !lightlike(first) || !lightlike(second) || first.t().signum() != second.t().signum() {
                return Err(absent("the two segments must be lightlike with the same time orientation"));
            }
            // the interior lies below a past-pointing pair and above a future-pointing one
            let inward = up.scale(first.t().signum());
            for dir in [first, second] {
                for s in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9] {
                    if !on_boundary(omega, &corner.offset(dir, s), &inward) {
                        return Err(absent("the broken segment is not on the boundary"));
                    }
                }
            }
            let eta = 0.5 * scale * first.t().abs();
            let z = corner.offset(&inward, eta);
            let x = z.offset(first, 1.0);
            let y = z.offset(second, 1.0);
            QuasiGeodesicTriangle::straight(&x, &y, &z, PER_SIDE, 1.0, 0.0)
        }
        WitnessKind::FlatSlice => {
            let c = omega.center();
            let size = 2f64.powi(k as i32);
            let mut e1 = Vector::zeros(n);
            e1.0[1] = 1.0;
            let (x, y, z) = if n >= 2 {
                let mut e2 = Vector::zeros(n);
                e2.0[2] = 1.0;
                let y = c.offset(&e1, size);
                let z = c.offset(&e1, 0.5 * size).offset(&e2, 0.75f64.sqrt() * size);
                (c.clone(), y, z)
            } else {
                (c.offset(&e1, -0.5 * size), c.offset(&e1, 0.5 * size), c.clone())
            };
            QuasiGeodesicTriangle::straight(&x, &y, &z, PER_SIDE, 1.0, 0.0)
        }
    };
    if tri.sides.iter().flatten().any(|p| !omega.contains(p)) {
        return Err(absent("the triangle leaves the domain"));
    }
    Ok(tri)
}

/// Two causal curves with common endpoints: the straight segment and the
/// broken lightlike path through a corner of the causal diamond, turning
/// toward spatial direction `toward`.
pub fn lightlike_bigon(from: &Event, to: &Event, toward: &[f64], samples: usize) -> Result<(Vec<Event>, Vec<Event>)> {
    if !causally_precedes(from, to) || from == to {
        return Err(Error::NotCausal);
    }
    let d = to - from;
    let dt = d.t();
    let dp = d.p();
    let l2: f64 = dp.iter().map(|c| c * c).sum();
    let mn = toward.iter().map(|c| c * c).sum::<f64>().sqrt();
    if toward.len() != dp.len() || mn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let m: Vec<f64> = toward.iter().map(|c| c / mn).collect();
    let denom = dt - dp.iter().zip(&m).map(|(a, b)| a * b).sum::<f64>();
    if denom <= 0.0 {
        return Err(Error::NotCausal);
    }
    let a = (dt * dt - l2) / (2.0 * denom);
    let mut v = vec![a];
    v.extend(m.iter().map(|c| a * c));
    let corner = from.offset(&Vector::from_slice(&v), 1.0);
    let half = (samples / 2).max(2);
    let mut broken = segment(from, &corner, half);
    broken.pop();
    broken.extend(segment(&corner, to, half));
    Ok((segment(from, to, samples), broken))
}

fn is_causal_curve(c: &[Event]) -> bool {
    c.windows(2).all(|w| w[0] == w[1] || causally_precedes(&w[0], &w[1]))
}

/// Largest one-sided Hausdorff defect of the first curve of each bigon from the second.
pub fn causal_thinness<D, F>(omega: &D, d: &F, bigons: &[(Vec<Event>, Vec<Event>)]) -> Result<f64>
where
    D: DomainOracle + ?Sized,
    F: Fn(&Event, &Event) -> Result<f64> + Sync,
{
    let mut worst: f64 = 0.0;
    for (c1, c2) in bigons {
        if c1.is_empty() || c2.is_empty() {
            return Err(Error::DegenerateSample("empty curve".into()));
        }
        if !is_causal_curve(c1) || !is_causal_curve(c2) {
            return Err(Error::NotCausal);
        }
        if c1.first() != c2.first() || c1.last() != c2.last() {
            return Err(Error::NotApplicable("bigon curves must share their endpoints".into()));
        }
        if c1.iter().chain(c2).any(|p| !omega.contains(p)) {
            return Err(Error::OutsideDomain);
        }
        let vals: Result<Vec<f64>> = c1
            .par_iter()
            .map(|p| {
                let mut best = f64::INFINITY;
                for q in c2 {
                    best = best.min(if p == q { 0.0 } else { d(p, q)? });
                }
                Ok(best)
            })
            .collect();
        worst = vals?.into_iter().fold(worst, f64::max);
    }
    Ok(worst)
}
