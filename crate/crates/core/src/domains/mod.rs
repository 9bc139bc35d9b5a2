//! Domains of Minkowski space behind a uniform oracle interface.
//!
//! A [`DomainOracle`] answers membership, ray-exit and boundary-distance
//! queries and carries honest structural flags. Closed-form domains live in
//! [`special`], graph-described causally convex domains in [`graph`].

mod acausal;
mod checks;
mod graph;
mod mapped;
mod special;

pub use acausal::{sample_graph_surface, stable_acausality_epsilon, AcausalityVerdict};
pub use checks::{causal_structure_checks, CheckParams, StructureReport};
pub use graph::{
    causal_boundary, AffinePiece, BaseRegion, CausalBoundary, GraphDomain, GraphDomainSpec, GraphFn,
    GraphFnSpec,
};
pub use mapped::MappedDomain;
pub use special::SpecialDomain;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{wick, wick_distance, Endpoint, Event, Vector};

/// Structural flags a domain declares about itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainFlags {
    pub convex: bool,
    pub causally_convex: bool,
    pub future_complete: bool,
    pub bounded: bool,
}

/// Direction along a ray or a time orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Future,
    Past,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Future => 1.0,
            Sign::Past => -1.0,
        }
    }
}

/// A cosmological time value with its maximizing boundary point.
#[derive(Clone, Debug, PartialEq)]
pub struct CosmoTime {
    /// `tau(x)`, possibly `+inf`.
    pub value: f64,
    /// The boundary point realizing the supremum, when the value is finite.
    pub singularity: Option<Event>,
    /// False when distinct maximizers were found.
    pub unique: bool,
}

impl CosmoTime {
    pub(crate) fn infinite() -> Self {
        CosmoTime {
            value: f64::INFINITY,
            singularity: None,
            unique: true,
        }
    }
}

/// Membership, ray-exit and boundary-distance oracle for an open domain.
pub trait DomainOracle: Send + Sync + std::fmt::Debug {
    /// Spatial dimension `n`.
    fn dim(&self) -> usize;

    fn contains(&self, x: &Event) -> bool;

    fn flags(&self) -> DomainFlags;

    /// Characteristic length used for horizons and tolerances.
    fn scale(&self) -> f64;

    /// A coordinate box for sampling and display; a window for unbounded domains.
    fn sampling_box(&self) -> (Event, Event);

    /// Some interior reference point.
    fn center(&self) -> Event;

    /// Wick distance from a member to the boundary (membership not checked).
    fn distance_to_boundary(&self, x: &Event) -> f64;

    /// A cheap lower bound on [`DomainOracle::distance_to_boundary`].
    fn clearance(&self, x: &Event) -> f64 {
        self.distance_to_boundary(x)
    }

    /// Smallest `s > 0` with `x + s v` on the boundary, or `None` past `s_max`.
    fn exit_param(&self, x: &Event, v: &[f64], s_max: f64) -> Option<f64> {
        march_exit(self, x, v, s_max)
    }

    /// Outer bounds `(inf, sup)` of the linear functional `<m, .>` over the domain.
    fn support(&self, _m: &[f64]) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Special domains known to contain this one.
    fn containers(&self) -> Vec<SpecialDomain> {
        Vec::new()
    }

    /// Past or future cosmological time.
    fn cosmological(&self, _x: &Event, _sign: Sign) -> Result<CosmoTime> {
        Err(Error::NotApplicable(
            "cosmological time is not available for this domain".into(),
        ))
    }

    /// Access to the closed-form description, when there is one.
    fn as_special(&self) -> Option<&SpecialDomain> {
        None
    }

    /// Description as the region between two graphs, when available.
    fn graph_form(&self) -> Option<GraphDomain> {
        None
    }
}

/// Horizon radius for infinity detection at `x`: `1e6 * (1 + diameter)`.
pub fn horizon<D: DomainOracle + ?Sized>(omega: &D, x: &Event) -> f64 {
    let (lo, hi) = omega.sampling_box();
    let mut diam2 = 0.0;
    for i in 0..x.0.len() {
        let a = lo[i].min(x[i]);
        let b = hi[i].max(x[i]);
        diam2 += (b - a) * (b - a);
    }
    1e6 * (1.0 + diam2.sqrt())
}

fn check_member<D: DomainOracle + ?Sized>(omega: &D, x: &Event) -> Result<()> {
    if x.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: x.dim(),
        });
    }
    if !x.is_finite() || !omega.contains(x) {
        return Err(Error::OutsideDomain);
    }
    Ok(())
}

/// Exit parameters of the line `x + s v` in both directions, in units of `v`.
pub(crate) fn exit_pair<D: DomainOracle + ?Sized>(
    omega: &D,
    x: &Event,
    v: &[f64],
) -> (Option<f64>, Option<f64>) {
    let s_max = horizon(omega, x) / wick(v);
    let neg: smallvec::SmallVec<[f64; 4]> = v.iter().map(|c| -c).collect();
    (
        omega.exit_param(x, &neg, s_max),
        omega.exit_param(x, v, s_max),
    )
}

/// The boundary point hit by the ray from `x` along `sign * v`.
pub fn ray_exit<D: DomainOracle + ?Sized>(
    omega: &D,
    x: &Event,
    v: &Vector,
    sign: Sign,
) -> Result<Endpoint> {
    check_member(omega, x)?;
    if v.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: v.dim(),
        });
    }
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let dir = v.scale(sign.factor());
    let s_max = horizon(omega, x) / wick(&dir.0);
    Ok(match omega.exit_param(x, &dir.0, s_max) {
        Some(s) => Endpoint::Finite(x.offset(&dir, s)),
        None => Endpoint::Infinite,
    })
}

/// Wick distance from `x` to the boundary.
pub fn boundary_distance<D: DomainOracle + ?Sized>(omega: &D, x: &Event) -> Result<f64> {
    check_member(omega, x)?;
    Ok(omega.distance_to_boundary(x))
}

/// Past or future cosmological time of `x`.
pub fn cosmological_time<D: DomainOracle + ?Sized>(omega: &D, x: &Event, sign: Sign) -> Result<f64> {
    check_member(omega, x)?;
    Ok(omega.cosmological(x, sign)?.value)
}

/// The boundary point realizing the cosmological time, with a uniqueness flag.
pub fn initial_singularity<D: DomainOracle + ?Sized>(
    omega: &D,
    x: &Event,
    sign: Sign,
) -> Result<(Event, bool)> {
    check_member(omega, x)?;
    let c = omega.cosmological(x, sign)?;
    match c.singularity {
        Some(y) if c.value.is_finite() => Ok((y, c.unique)),
        _ => Err(Error::InfiniteTime),
    }
}

/// Sphere tracing along the ray with [`DomainOracle::clearance`], then bisection.
pub(crate) fn march_exit<D: DomainOracle + ?Sized>(
    omega: &D,
    x: &Event,
    v: &[f64],
    s_max: f64,
) -> Option<f64> {
    let vn = wick(v);
    if vn == 0.0 {
        return None;
    }
    let at = |s: f64| Event(x.0.iter().zip(v).map(|(a, b)| a + s * b).collect());
    let scale = omega.scale();
    let mut s_in = 0.0;
    let mut s = 0.0;
    let mut s_out = None;
    for _ in 0..100_000 {
        let z = at(s);
        if !omega.contains(&z) {
            s_out = Some(s);
            break;
        }
        s_in = s;
        if s > s_max {
            return None;
        }
        let c = omega.clearance(&z).max(0.0);
        if c.is_infinite() {
            return None;
        }
        let floor = 1e-4 * (s * vn).max(scale);
        s += c.max(floor) / vn;
    }
    let mut hi = s_out?;
    let mut lo = s_in;
    while hi - lo > 1e-12 * hi.max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if omega.contains(&at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Numerical boundary distance by shooting rays in many directions.
///
/// Returns an upper estimate; used where no analytic distance is available.
pub(crate) fn shooting_distance<D: DomainOracle + ?Sized>(omega: &D, x: &Event) -> f64 {
    let d = x.0.len();
    let s_max = horizon(omega, x);
    let mut best = f64::INFINITY;
    let mut best_dir: Vec<f64> = vec![0.0; d];
    for dir in crate::sampling::sphere_directions(d, 256) {
        if let Some(s) = omega.exit_param(x, &dir, s_max) {
            if s < best {
                best = s;
                best_dir = dir;
            }
        }
    }
    if !best.is_finite() {
        return best;
    }
    // local refinement around the best direction
    let mut step = 0.2;
    for _ in 0..40 {
        let mut improved = false;
        for i in 0..d {
            for sgn in [-1.0, 1.0] {
                let mut c = best_dir.clone();
                c[i] += sgn * step;
                let n = wick(&c);
                c.iter_mut().for_each(|v| *v /= n);
                if let Some(s) = omega.exit_param(x, &c, s_max) {
                    if s < best {
                        best = s;
                        best_dir = c;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Wick distance between two points, re-exported for domain implementations.
pub(crate) fn dist(x: &Event, y: &Event) -> f64 {
    wick_distance(x, y)
}
