//! Causally convex domains written as `f-(p) < t < f+(p)` over a base region.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CosmoTime, DomainFlags, DomainOracle, Sign, SpecialDomain};
use crate::error::{Error, Result};
use crate::minkowski::Event;
use crate::optim::minimize;
use crate::sampling::{rng, sphere_directions};

/// One affine piece `constant + gradient . p` of a max-affine function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffinePiece {
    pub constant: f64,
    pub gradient: Vec<f64>,
}

/// Serializable graph functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphFnSpec {
    /// `-inf` as a lower function, `+inf` as an upper one.
    Infinite,
    Constant { value: f64 },
    /// `offset + slope * |p[..dims] - center[..dims]|`; `dims` defaults to all.
    Cone {
        center: Vec<f64>,
        offset: f64,
        slope: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dims: Option<usize>,
    },
    /// Pointwise maximum of affine pieces.
    MaxAffine { pieces: Vec<AffinePiece> },
    /// Multilinear interpolation of samples on a regular grid, clamped outside.
    /// `values` is row-major with the last coordinate varying fastest.
    Grid {
        lo: Vec<f64>,
        hi: Vec<f64>,
        counts: Vec<usize>,
        values: Vec<f64>,
    },
}

type Closure = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum FnKind {
    Spec(GraphFnSpec),
    Closure(Closure),
}

/// A graph function given analytically, by samples, or as a closure.
#[derive(Clone)]
pub struct GraphFn(FnKind);

impl fmt::Debug for GraphFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            FnKind::Spec(s) => s.fmt(f),
            FnKind::Closure(_) => f.write_str("GraphFn(<closure>)"),
        }
    }
}

impl GraphFn {
    pub fn spec(spec: GraphFnSpec) -> Self {
        GraphFn(FnKind::Spec(spec))
    }

    pub fn infinite() -> Self {
        GraphFn::spec(GraphFnSpec::Infinite)
    }

    pub fn closure(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        GraphFn(FnKind::Closure(Arc::new(f)))
    }

    pub fn as_spec(&self) -> Option<&GraphFnSpec> {
        match &self.0 {
            FnKind::Spec(s) => Some(s),
            FnKind::Closure(_) => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.0, FnKind::Spec(GraphFnSpec::Infinite))
    }

    /// Value at `p`; `+inf` for [`GraphFnSpec::Infinite`].
    pub fn eval(&self, p: &[f64]) -> f64 {
        match &self.0 {
            FnKind::Closure(f) => f(p),
            FnKind::Spec(s) => match s {
                GraphFnSpec::Infinite => f64::INFINITY,
                GraphFnSpec::Constant { value } => *value,
                GraphFnSpec::Cone {
                    center,
                    offset,
                    slope,
                    dims,
                } => {
                    let k = dims.unwrap_or(p.len()).min(p.len());
                    let r = p[..k]
                        .iter()
                        .zip(center)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    offset + slope * r
                }
                GraphFnSpec::MaxAffine { pieces } => pieces
                    .iter()
                    .map(|pc| pc.constant + pc.gradient.iter().zip(p).map(|(g, x)| g * x).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max),
                GraphFnSpec::Grid {
                    lo,
                    hi,
                    counts,
                    values,
                } => interpolate(lo, hi, counts, values, p),
            },
        }
    }

    /// Known convexity, when it can be read off the description.
    fn convex(&self) -> Option<bool> {
        match self.as_spec()? {
            GraphFnSpec::Infinite | GraphFnSpec::Constant { .. } | GraphFnSpec::MaxAffine { .. } => Some(true),
            GraphFnSpec::Cone { slope, .. } => Some(*slope >= 0.0),
            GraphFnSpec::Grid { .. } => None,
        }
    }

    fn concave(&self) -> Option<bool> {
        match self.as_spec()? {
            GraphFnSpec::Infinite | GraphFnSpec::Constant { .. } => Some(true),
            GraphFnSpec::MaxAffine { pieces } => Some(pieces.len() <= 1),
            GraphFnSpec::Cone { slope, .. } => Some(*slope <= 0.0),
            GraphFnSpec::Grid { .. } => None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidDomain(m.to_string()));
        match self.as_spec() {
            Some(GraphFnSpec::Cone { center, dims, .. }) => {
                if center.len() != n || dims.is_some_and(|k| k > n) {
                    return bad("cone graph: center must have n entries and dims <= n");
                }
            }
            Some(GraphFnSpec::MaxAffine { pieces }) => {
                if pieces.is_empty() || pieces.iter().any(|p| p.gradient.len() != n) {
                    return bad("max-affine graph: need at least one piece with n gradient entries");
                }
            }
            Some(GraphFnSpec::Grid {
                lo,
                hi,
                counts,
                values,
            }) => {
                if lo.len() != n || hi.len() != n || counts.len() != n {
                    return bad("grid graph: lo, hi and counts need n entries");
                }
                if counts.iter().any(|&c| c < 2) || lo.iter().zip(hi).any(|(a, b)| b <= a) {
                    return bad("grid graph: need at least 2 samples per axis and lo < hi");
                }
                if counts.iter().product::<usize>() != values.len() {
                    return bad("grid graph: values length must equal the product of counts");
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Multilinear interpolation with clamping to the grid box.
fn interpolate(lo: &[f64], hi: &[f64], counts: &[usize], values: &[f64], p: &[f64]) -> f64 {
    let n = counts.len();
    let mut base = vec![0usize; n];
    let mut frac = vec![0.0; n];
    for i in 0..n {
        let h = (hi[i] - lo[i]) / (counts[i] - 1) as f64;
        let u = ((p[i] - lo[i]) / h).clamp(0.0, (counts[i] - 1) as f64);
        let b = (u.floor() as usize).min(counts[i] - 2);
        base[i] = b;
        frac[i] = u - b as f64;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << n) {
        let mut w = 1.0;
        let mut idx = 0usize;
        for i in 0..n {
            let bit = (corner >> i) & 1;
            w *= if bit == 1 { frac[i] } else { 1.0 - frac[i] };
            idx = idx * counts[i] + base[i] + bit;
        }
        if w != 0.0 {
            acc += w * values[idx];
        }
    }
    acc
}

/// The spatial region `U` over which the graphs live.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseRegion {
    Whole,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `{p : a_i . p < b_i}`.
    Polytope { a: Vec<Vec<f64>>, b: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl BaseRegion {
    /// Signed Euclidean distance to the boundary, positive inside.
    /// Exact for boxes and balls, the facet minimum for polytopes.
    pub fn interior_distance(&self, p: &[f64]) -> f64 {
        match self {
            BaseRegion::Whole => f64::INFINITY,
            BaseRegion::Box { lo, hi } => {
                let mut d = f64::INFINITY;
                let mut outside = 0.0;
                for i in 0..p.len() {
                    let a = p[i] - lo[i];
                    let b = hi[i] - p[i];
                    d = d.min(a).min(b);
                    let o = (-a).max(-b).max(0.0);
                    outside += o * o;
                }
                if d >= 0.0 {
                    d
                } else {
                    -outside.sqrt()
                }
            }
            BaseRegion::Polytope { a, b } => a
                .iter()
                .zip(b)
                .map(|(row, bi)| {
                    let nrm = row.iter().map(|c| c * c).sum::<f64>().sqrt();
                    (bi - row.iter().zip(p).map(|(x, y)| x * y).sum::<f64>()) / nrm
                })
                .fold(f64::INFINITY, f64::min),
            BaseRegion::Ball { center, radius } => {
                radius
                    - p.iter()
                        .zip(center)
                        .map(|(x, c)| (x - c) * (x - c))
                        .sum::<f64>()
                        .sqrt()
            }
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.interior_distance(p) > 0.0
    }

    /// Nearest point of the closed region (approximate for polytopes).
    pub fn project(&self, p: &[f64]) -> Vec<f64> {
        match self {
            BaseRegion::Whole => p.to_vec(),
            BaseRegion::Box { lo, hi } => p.iter().enumerate().map(|(i, x)| x.clamp(lo[i], hi[i])).collect(),
            BaseRegion::Ball { center, radius } => {
                let d: Vec<f64> = p.iter().zip(center).map(|(x, c)| x - c).collect();
                let r = d.iter().map(|c| c * c).sum::<f64>().sqrt();
                if r <= *radius {
                    p.to_vec()
                } else {
                    center.iter().zip(&d).map(|(c, x)| c + x * radius / r).collect()
                }
            }
            BaseRegion::Polytope { a, b } => {
                let mut q = p.to_vec();
                for _ in 0..100 {
                    let mut moved = false;
                    for (row, bi) in a.iter().zip(b) {
                        let s: f64 = row.iter().zip(&q).map(|(x, y)| x * y).sum();
                        if s > *bi {
                            let n2: f64 = row.iter().map(|c| c * c).sum();
                            let k = (s - bi) / n2;
                            q.iter_mut().zip(row).for_each(|(x, r)| *x -= k * r);
                            moved = true;
                        }
                    }
                    if !moved {
                        break;
                    }
                }
                q
            }
        }
    }

    /// Nearest point of the region's boundary to an interior point.
    fn nearest_boundary_point(&self, p: &[f64]) -> Option<Vec<f64>> {
        match self {
            BaseRegion::Whole => None,
            BaseRegion::Box { lo, hi } => {
                let (mut best, mut axis, mut to) = (f64::INFINITY, 0, 0.0);
                for i in 0..p.len() {
                    for v in [lo[i], hi[i]] {
                        if (p[i] - v).abs() < best {
                            best = (p[i] - v).abs();
                            axis = i;
                            to = v;
                        }
                    }
                }
                let mut q = p.to_vec();
                q[axis] = to;
                Some(q)
            }
            BaseRegion::Ball { center, radius } => {
                let d: Vec<f64> = p.iter().zip(center).map(|(x, c)| x - c).collect();
                let r = d.iter().map(|c| c * c).sum::<f64>().sqrt();
                Some(if r == 0.0 {
                    let mut q = center.clone();
                    q[0] += radius;
                    q
                } else {
                    center.iter().zip(&d).map(|(c, x)| c + x * radius / r).collect()
                })
            }
            BaseRegion::Polytope { a, b } => {
                let mut best: Option<(f64, Vec<f64>)> = None;
                for (row, bi) in a.iter().zip(b) {
                    let n2: f64 = row.iter().map(|c| c * c).sum();
                    let s: f64 = row.iter().zip(p).map(|(x, y)| x * y).sum();
                    let k = (bi - s) / n2;
                    let dist = k.abs() * n2.sqrt();
                    if best.as_ref().map_or(true, |(d, _)| dist < *d) {
                        best = Some((dist, p.iter().zip(row).map(|(x, r)| x + k * r).collect()));
                    }
                }
                best.map(|(_, q)| q)
            }
        }
    }

    /// A coordinate window `(lo, hi)` for sampling.
    pub fn window(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            BaseRegion::Whole | BaseRegion::Polytope { .. } => (vec![-2.0; n], vec![2.0; n]),
            BaseRegion::Box { lo, hi } => (lo.clone(), hi.clone()),
            BaseRegion::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    fn bounded(&self) -> bool {
        matches!(self, BaseRegion::Box { .. } | BaseRegion::Ball { .. })
    }

    fn validate(&self, n: usize) -> Result<()> {
        let ok = match self {
            BaseRegion::Whole => true,
            BaseRegion::Box { lo, hi } => lo.len() == n && hi.len() == n && lo.iter().zip(hi).all(|(a, b)| a < b),
            BaseRegion::Polytope { a, b } => !a.is_empty() && a.len() == b.len() && a.iter().all(|r| r.len() == n),
            BaseRegion::Ball { center, radius } => center.len() == n && *radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDomain("malformed base region".into()))
        }
    }
}

/// Serializable description of a [`GraphDomain`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDomainSpec {
    pub n: usize,
    pub base: BaseRegion,
    pub lower: GraphFnSpec,
    pub upper: GraphFnSpec,
    pub lipschitz_lower: f64,
    pub lipschitz_upper: f64,
}

impl GraphDomainSpec {
    pub fn build(&self) -> Result<GraphDomain> {
        GraphDomain::new(
            self.n,
            self.base.clone(),
            GraphFn::spec(self.lower.clone()),
            GraphFn::spec(self.upper.clone()),
            self.lipschitz_lower,
            self.lipschitz_upper,
        )
    }
}

/// The future and past causal boundaries as graphs over the base region.
#[derive(Clone, Debug)]
pub struct CausalBoundary {
    pub base: BaseRegion,
    /// Graph of `f+`; `None` when `f+ = +inf`.
    pub future: Option<GraphFn>,
    /// Graph of `f-`; `None` when `f- = -inf`.
    pub past: Option<GraphFn>,
}

impl CausalBoundary {
    /// The point of the future or past boundary above `p`.
    pub fn point(&self, p: &[f64], sign: Sign) -> Option<Event> {
        let f = match sign {
            Sign::Future => self.future.as_ref()?,
            Sign::Past => self.past.as_ref()?,
        };
        Some(Event::new(f.eval(p), p))
    }
}

/// A domain `{(t, p) : p in U, f-(p) < t < f+(p)}` with Lipschitz graphs.
#[derive(Clone, Debug)]
pub struct GraphDomain {
    n: usize,
    base: BaseRegion,
    lower: GraphFn,
    upper: GraphFn,
    lip_lower: f64,
    lip_upper: f64,
    convex: bool,
}

impl GraphDomain {
    /// Builds the domain after auditing the declared Lipschitz bounds (each at most 1).
    pub fn new(
        n: usize,
        base: BaseRegion,
        lower: GraphFn,
        upper: GraphFn,
        lip_lower: f64,
        lip_upper: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDomain("n must be at least 1".into()));
        }
        base.validate(n)?;
        lower.validate(n)?;
        upper.validate(n)?;
        for l in [lip_lower, lip_upper] {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::InvalidDomain(format!("declared Lipschitz bound {l} not in [0, 1]")));
            }
        }
        let convex = lower.convex() == Some(true) && upper.concave() == Some(true);
        let dom = GraphDomain {
            n,
            base,
            lower,
            upper,
            lip_lower,
            lip_upper,
            convex,
        };
        let (ql, qu) = dom.lipschitz_audit(4000, 11);
        if ql > lip_lower + 1e-9 || qu > lip_upper + 1e-9 {
            return Err(Error::InvalidDomain(format!(
                "sampled Lipschitz quotients ({ql:.6}, {qu:.6}) exceed the declared bounds ({lip_lower}, {lip_upper})"
            )));
        }
        let mut r = rng(12);
        let (lo, hi) = dom.base.window(n);
        for _ in 0..1000 {
            let p: Vec<f64> = (0..n).map(|i| r.gen_range(lo[i]..hi[i])).collect();
            if dom.base.contains(&p) && dom.lower_at(&p) >= dom.upper_at(&p) {
                return Err(Error::InvalidDomain("need f- < f+ on the base region".into()));
            }
        }
        Ok(dom)
    }

    /// Overrides the convexity flag (for closures whose shape is known).
    pub fn with_convex(mut self, convex: bool) -> Self {
        self.convex = convex;
        self
    }

    pub fn base(&self) -> &BaseRegion {
        &self.base
    }

    pub fn lower(&self) -> &GraphFn {
        &self.lower
    }

    pub fn upper(&self) -> &GraphFn {
        &self.upper
    }

    pub fn lipschitz_bounds(&self) -> (f64, f64) {
        (self.lip_lower, self.lip_upper)
    }

    pub fn lower_at(&self, p: &[f64]) -> f64 {
        if self.lower.is_infinite() {
            f64::NEG_INFINITY
        } else {
            self.lower.eval(p)
        }
    }

    pub fn upper_at(&self, p: &[f64]) -> f64 {
        self.upper.eval(p)
    }

    /// Largest sampled quotient `|f(p) - f(q)| / |p - q|` for `(f-, f+)`.
    ///
    /// Uses random pairs plus short-range pairs to catch local slopes.
    pub fn lipschitz_audit(&self, pairs: usize, seed: u64) -> (f64, f64) {
        let mut r = rng(seed);
        let (lo, hi) = self.base.window(self.n);
        let draw = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            (0..self.n).map(|i| r.gen_range(lo[i]..hi[i])).collect()
        };
        let mut q = (0.0f64, 0.0f64);
        for k in 0..pairs {
            let p = draw(&mut r);
            let s = if k % 2 == 0 {
                draw(&mut r)
            } else {
                let h = 1e-3 * (hi[0] - lo[0]);
                p.iter().map(|c| c + h * r.gen_range(-1.0..1.0)).collect()
            };
            if !self.base.contains(&p) || !self.base.contains(&s) {
                continue;
            }
            let d = p.iter().zip(&s).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if d < 1e-12 {
                continue;
            }
            for (which, acc) in [(&self.lower, &mut q.0), (&self.upper, &mut q.1)] {
                if which.is_infinite() {
                    continue;
                }
                let v = (which.eval(&p) - which.eval(&s)).abs() / d;
                *acc = acc.max(v);
            }
        }
        q
    }

    /// Wick distance from `x` to the graph of `f` (lower or upper).
    fn graph_distance(&self, x: &Event, upper: bool) -> f64 {
        let f = if upper { &self.upper } else { &self.lower };
        if f.is_infinite() {
            return f64::INFINITY;
        }
        let t = x.t();
        let p = x.p();
        let obj = |q: &[f64]| -> f64 {
            let q = self.base.project(q);
            let dt = t - f.eval(&q);
            let dp: f64 = q.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            (dt * dt + dp).sqrt()
        };
        let gap = (t - f.eval(p)).abs();
        let mut best = gap;
        let mut starts = vec![p.to_vec()];
        for i in 0..self.n {
            for s in [-0.5, 0.5] {
                let mut q = p.to_vec();
                q[i] += s * gap;
                starts.push(q);
            }
        }
        for s in starts {
            let (_, v) = minimize(&obj, &s, 0.25 * gap.max(1e-9));
            best = best.min(v);
        }
        best
    }

    /// Cosmological time by multistart maximization of `T` over a boundary graph.
    fn cosmo_search(&self, x: &Event, sign: Sign) -> CosmoTime {
        let (f, sg) = match sign {
            Sign::Past => (&self.lower, 1.0),
            Sign::Future => (&self.upper, -1.0),
        };
        if f.is_infinite() {
            return CosmoTime::infinite();
        }
        let t = x.t();
        let p = x.p().to_vec();
        // separation along the time axis from the boundary point over q
        let lapse = |q: &[f64]| sg * (t - f.eval(q));
        let spatial = |q: &[f64]| q.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let obj = |q: &[f64]| -> f64 {
            let q = self.base.project(q);
            let (dt, dr) = (lapse(&q), spatial(&q));
            if dt >= dr {
                -((dt - dr) * (dt + dr)).sqrt()
            } else {
                dr - dt
            }
        };
        let gap = lapse(&p).max(1e-12);
        let dirs = sphere_directions(self.n, 8);
        let per_dir = (32 / dirs.len()).max(1);
        let mut found: Vec<(Vec<f64>, f64)> = Vec::new();
        for u in &dirs {
            let along = |rho: f64| -> Vec<f64> { p.iter().zip(u).map(|(a, b)| a + rho * b).collect() };
            let feasible = |rho: f64| {
                let q = along(rho);
                self.base.contains(&q) && lapse(&q) >= spatial(&q)
            };
            let mut hi = gap;
            while feasible(hi) && hi < 1e6 * gap {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            for j in 0..per_dir {
                let rho = lo * (j as f64 + 0.5) / per_dir as f64;
                let (q, v) = minimize(&obj, &along(rho), 0.1 * lo.max(gap));
                found.push((self.base.project(&q), -v));
            }
        }
        found.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (q_best, v_best) = found[0].clone();
        let unique = !found.iter().skip(1).any(|(q, v)| {
            (v_best - v).abs() < 1e-8 * v_best.abs().max(1.0)
                && q.iter().zip(&q_best).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() > 1e-6
        });
        let y = Event::new(f.eval(&q_best), &q_best);
        CosmoTime {
            value: v_best.max(0.0),
            singularity: Some(y),
            unique,
        }
    }
}

/// The causal boundary of a domain that admits a graph description.
pub fn causal_boundary<D: DomainOracle + ?Sized>(omega: &D) -> Result<CausalBoundary> {
    let g = omega
        .graph_form()
        .ok_or_else(|| Error::NotApplicable("domain is not in graph form".into()))?;
    Ok(CausalBoundary {
        base: g.base.clone(),
        future: (!g.upper.is_infinite()).then(|| g.upper.clone()),
        past: (!g.lower.is_infinite()).then(|| g.lower.clone()),
    })
}

impl DomainOracle for GraphDomain {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, x: &Event) -> bool {
        if x.dim() != self.n {
            return false;
        }
        let p = x.p();
        self.base.contains(p) && self.lower_at(p) < x.t() && x.t() < self.upper_at(p)
    }

    fn flags(&self) -> DomainFlags {
        let whole = matches!(self.base, BaseRegion::Whole);
        DomainFlags {
            convex: self.convex,
            causally_convex: true,
            future_complete: whole && self.upper.is_infinite(),
            bounded: self.base.bounded() && !self.upper.is_infinite() && !self.lower.is_infinite(),
        }
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.sampling_box();
        super::dist(&lo, &hi) / 2.0
    }

    fn sampling_box(&self) -> (Event, Event) {
        let (lo, hi) = self.base.window(self.n);
        let mut tmin = f64::INFINITY;
        let mut tmax = f64::NEG_INFINITY;
        let corners = 1usize << self.n.min(10);
        let mut probe: Vec<Vec<f64>> = vec![lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()];
        for c in 0..corners {
            probe.push((0..self.n).map(|i| if (c >> i) & 1 == 1 { hi[i] } else { lo[i] }).collect());
        }
        for q in &probe {
            let q = self.base.project(q);
            for v in [self.lower_at(&q), self.upper_at(&q)] {
                if v.is_finite() {
                    tmin = tmin.min(v);
                    tmax = tmax.max(v);
                }
            }
        }
        if !tmin.is_finite() {
            tmin = -2.0;
            tmax = 2.0;
        }
        if self.lower.is_infinite() {
            tmin -= 2.0;
        }
        if self.upper.is_infinite() {
            tmax += 2.0;
        }
        (Event::new(tmin, &lo), Event::new(tmax, &hi))
    }

    fn center(&self) -> Event {
        let (lo, hi) = self.base.window(self.n);
        let p = self.base.project(&lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect::<Vec<_>>());
        let (a, b) = (self.lower_at(&p), self.upper_at(&p));
        let t = match (a.is_finite(), b.is_finite()) {
            (true, true) => 0.5 * (a + b),
            (true, false) => a + 1.0,
            (false, true) => b - 1.0,
            (false, false) => 0.0,
        };
        Event::new(t, &p)
    }

    fn distance_to_boundary(&self, x: &Event) -> f64 {
        let mut d = self.graph_distance(x, false).min(self.graph_distance(x, true));
        if let Some(q) = self.base.nearest_boundary_point(x.p()) {
            let (a, b) = (self.lower_at(&q), self.upper_at(&q));
            let dt = if x.t() < a {
                a - x.t()
            } else if x.t() > b {
                x.t() - b
            } else {
                0.0
            };
            let dp: f64 = q.iter().zip(x.p()).map(|(u, v)| (u - v) * (u - v)).sum();
            d = d.min((dt * dt + dp).sqrt());
        }
        d.max(self.clearance(x))
    }

    fn clearance(&self, x: &Event) -> f64 {
        let p = x.p();
        let lo = (x.t() - self.lower_at(p)) / (1.0 + self.lip_lower * self.lip_lower).sqrt();
        let hi = (self.upper_at(p) - x.t()) / (1.0 + self.lip_upper * self.lip_upper).sqrt();
        lo.min(hi).min(self.base.interior_distance(p))
    }

    fn cosmological(&self, x: &Event, sign: Sign) -> Result<CosmoTime> {
        if sign == Sign::Future && self.flags().future_complete {
            return Ok(CosmoTime::infinite());
        }
        Ok(self.cosmo_search(x, sign))
    }

    fn graph_form(&self) -> Option<GraphDomain> {
        Some(self.clone())
    }

    fn containers(&self) -> Vec<SpecialDomain> {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{boundary_distance, cosmological_time};

    fn omega_eps(eps: f64, n: usize) -> GraphDomain {
        SpecialDomain::StableConeComplement { eps, n }.to_graph_domain().unwrap()
    }

    #[test]
    fn grid_interpolation_reproduces_bilinear_functions() {
        let (lo, hi, counts) = (vec![0.0, 0.0], vec![1.0, 2.0], vec![3, 5]);
        let mut values = Vec::new();
        for i in 0..3 {
            for j in 0..5 {
                let (x, y) = (i as f64 * 0.5, j as f64 * 0.5);
                values.push(1.0 + 2.0 * x - y + 0.5 * x * y);
            }
        }
        let f = GraphFn::spec(GraphFnSpec::Grid { lo, hi, counts, values });
        let v = f.eval(&[0.3, 1.7]);
        assert!((v - (1.0 + 0.6 - 1.7 + 0.5 * 0.3 * 1.7)).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_violation_is_rejected() {
        let steep = GraphFn::closure(|p: &[f64]| 2.0 * p[0]);
        let r = GraphDomain::new(1, BaseRegion::Whole, steep, GraphFn::infinite(), 1.0, 0.0);
        assert!(r.is_err());
    }

    #[test]
    fn causal_boundary_examples() {
        let slab = SpecialDomain::SpacelikeSlab { height: 1.0, n: 1 };
        let cb = causal_boundary(&slab).unwrap();
        assert_eq!(cb.point(&[0.3], Sign::Future).unwrap(), Event::new(1.0, &[0.3]));
        assert_eq!(cb.point(&[0.3], Sign::Past).unwrap(), Event::new(-1.0, &[0.3]));

        let h = SpecialDomain::HalfSpaceFuture {
            point: Event::new(0.0, &[0.0]),
            normal: None,
        };
        let cb = causal_boundary(&h).unwrap();
        assert!(cb.future.is_none());
        assert_eq!(cb.point(&[2.0], Sign::Past).unwrap(), Event::new(0.0, &[2.0]));

        let d = SpecialDomain::Diamond {
            a: Event::new(-1.0, &[0.0]),
            b: Event::new(1.0, &[0.0]),
        };
        let cb = causal_boundary(&d).unwrap();
        assert!((cb.point(&[0.25], Sign::Future).unwrap().t() - 0.75).abs() < 1e-15);
        assert!((cb.point(&[-0.25], Sign::Past).unwrap().t() + 0.75).abs() < 1e-15);
    }

    #[test]
    fn graph_boundary_distance_matches_closed_form() {
        for eps in [0.5, 1.0] {
            let special = SpecialDomain::StableConeComplement { eps, n: 1 };
            let g = omega_eps(eps, 1);
            for x in [[1.0, 0.3], [-0.2, 1.5], [0.5, -2.0]] {
                let x = Event::from_slice(&x);
                let a = boundary_distance(&special, &x).unwrap();
                let b = boundary_distance(&g, &x).unwrap();
                assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn generic_cosmological_time_matches_closed_form() {
        let special = SpecialDomain::StableConeComplement { eps: 1.0, n: 2 };
        let g = omega_eps(1.0, 2);
        let x = Event::new(0.7, &[0.4, -0.9]);
        let a = cosmological_time(&special, &x, Sign::Past).unwrap();
        let b = cosmological_time(&g, &x, Sign::Past).unwrap();
        assert!((a - b).abs() <= 1e-4 * a, "{a} vs {b}");
    }
}
