//! Null distance of a time function.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use super::connector::{ConnectorGraph, LinkCost};
use super::dijkstra::dijkstra;
use super::lattice::NullLattice;
use super::{CausalPath, DistanceEstimate, EstimateKind, Mesh, Witness};
use crate::domains::{DomainOracle, Sign};
use crate::error::{Error, Result};
use crate::minkowski::{causally_precedes, causally_related, Event};

/// Time function handle.
#[derive(Clone)]
pub enum TimeFunction {
    /// `ln tau-`, the logarithm of the past cosmological time.
    LogPast,
    /// `ln(tau- / tau+)`.
    LogRatio,
    /// A caller-supplied function.
    Custom(Arc<dyn Fn(&Event) -> f64 + Send + Sync>),
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeFunction::LogPast => f.write_str("LogPast"),
            TimeFunction::LogRatio => f.write_str("LogRatio"),
            TimeFunction::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl TimeFunction {
    pub fn custom(f: impl Fn(&Event) -> f64 + Send + Sync + 'static) -> Self {
        TimeFunction::Custom(Arc::new(f))
    }

    pub fn name(&self) -> &'static str {
        match self {
            TimeFunction::LogPast => "log_past",
            TimeFunction::LogRatio => "log_ratio",
            TimeFunction::Custom(_) => "custom",
        }
    }

    /// Value at a member of the domain.
    pub fn eval<D: DomainOracle + ?Sized>(&self, omega: &D, x: &Event) -> Result<f64> {
        let v = match self {
            TimeFunction::LogPast => omega.cosmological(x, Sign::Past)?.value.ln(),
            TimeFunction::LogRatio => {
                let past = omega.cosmological(x, Sign::Past)?.value;
                let fut = omega.cosmological(x, Sign::Future)?.value;
                (past / fut).ln()
            }
            TimeFunction::Custom(f) => f(x),
        };
        if !v.is_finite() {
            return Err(Error::InfiniteTime);
        }
        Ok(v)
    }
}

/// Time increments as link costs; remembers any future link along which the
/// function fails to increase.
struct NullCost<'a, D: DomainOracle + ?Sized> {
    omega: &'a D,
    tau: &'a TimeFunction,
    invalid: AtomicBool,
}

impl<D: DomainOracle + ?Sized> NullCost<'_, D> {
    fn increment(&self, p: &Event, q: &Event) -> Option<f64> {
        let (tp, tq) = (self.tau.eval(self.omega, p).ok()?, self.tau.eval(self.omega, q).ok()?);
        // orient along the future
        let d = if q.t() >= p.t() { tq - tp } else { tp - tq };
        if d <= 0.0 {
            self.invalid.store(true, Ordering::Relaxed);
        }
        Some(d.abs())
    }
}

impl<D: DomainOracle + ?Sized> LinkCost for NullCost<'_, D> {
    fn link(&self, p: &Event, v: &[f64]) -> Option<(f64, bool)> {
        let q = Event(p.0.iter().zip(v).map(|(a, b)| a + b).collect());
        if !self.omega.contains(&q) {
            return None;
        }
        if !self.omega.flags().causally_convex && super::edge::segment_cost_raw(self.omega, p, v).is_none() {
            return None;
        }
        self.increment(p, &q).map(|d| (d, false))
    }

    fn causal_link(&self, p: &Event, q: &Event) -> Option<f64> {
        self.increment(p, q)
    }
}

fn invalid() -> Error {
    Error::InvalidTimeFunction("the time function does not increase along a future causal link".into())
}

/// Null distance between two members.
///
/// Causally related pairs get the exact value `|tau(y) - tau(x)|`; other pairs an
/// upper bound from a shortest zigzag of lightlike links.
pub fn null_distance<D: DomainOracle + ?Sized>(
    omega: &D,
    tau: &TimeFunction,
    x: &Event,
    y: &Event,
    mesh: &Mesh,
) -> Result<DistanceEstimate> {
    for p in [x, y] {
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
    if x == y {
        return Ok(DistanceEstimate::exact(0.0));
    }
    let (tx, ty) = (tau.eval(omega, x)?, tau.eval(omega, y)?);
    if causally_related(x, y) {
        let (lo, hi) = if causally_precedes(x, y) { (tx, ty) } else { (ty, tx) };
        if hi <= lo {
            return Err(invalid());
        }
        let mut est = DistanceEstimate::exact(hi - lo);
        est.witness = Some(Witness::Path(CausalPath {
            vertices: vec![x.clone(), y.clone()],
            increments: vec![ty - tx],
        }));
        return Ok(est);
    }
    let (vertices, total) = if omega.dim() == 1 {
        let lat = NullLattice::build(omega, x, y, mesh)?;
        let times: Vec<Option<f64>> = (0..lat.node_count())
            .into_par_iter()
            .map(|k| {
                if lat.is_inside(k) {
                    tau.eval(omega, &lat.node_at(k)).ok()
                } else {
                    None
                }
            })
            .collect();
        let bad = AtomicBool::new(false);
        let g = lat.weighted_graph(|past, fut| {
            let d = times[fut]? - times[past]?;
            if d <= 0.0 {
                bad.store(true, Ordering::Relaxed);
            }
            Some(d.abs())
        })?;
        if bad.load(Ordering::Relaxed) {
            return Err(invalid());
        }
        let (s, t) = (lat.source_index(), lat.target_index());
        let sp = dijkstra(&g, s, &[t]);
        let path = sp.path_to(t).ok_or(Error::Disconnected)?;
        let chain = lat.chain_from_path(&path, &sp.dist);
        (chain.vertices, sp.dist[t])
    } else {
        let cost = NullCost {
            omega,
            tau,
            invalid: AtomicBool::new(false),
        };
        let g = ConnectorGraph::build_with(omega, &[x.clone(), y.clone()], mesh, true, &cost)?;
        if cost.invalid.load(Ordering::Relaxed) {
            return Err(invalid());
        }
        let (vertices, _, total) = g.expand(0, 1, &cost)?;
        (vertices, total)
    };
    let mut increments = Vec::with_capacity(vertices.len().saturating_sub(1));
    for w in vertices.windows(2) {
        increments.push(tau.eval(omega, &w[1])? - tau.eval(omega, &w[0])?);
    }
    Ok(DistanceEstimate {
        value: total,
        kind: EstimateKind::Upper,
        mesh: mesh.fingerprint(),
        witness: Some(Witness::Path(CausalPath { vertices, increments })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::SpecialDomain;
    use std::f64::consts::E;

    fn e(c: &[f64]) -> Event {
        Event::from_slice(c)
    }

    fn half() -> SpecialDomain {
        SpecialDomain::HalfSpaceFuture {
            point: e(&[0.0, 0.0]),
            normal: None,
        }
    }

    #[test]
    fn causal_pair_is_exact() {
        let d = null_distance(&half(), &TimeFunction::LogPast, &e(&[1.0, 0.0]), &e(&[E, 0.0]), &Mesh::default()).unwrap();
        assert_eq!(d.kind, EstimateKind::Exact);
        assert!((d.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spacelike_pair_goes_through_the_lattice() {
        let (x, y) = (e(&[1.0, -0.5]), e(&[1.0, 0.5]));
        let d = null_distance(&half(), &TimeFunction::LogPast, &x, &y, &Mesh::default().with_k(32)).unwrap();
        assert_eq!(d.kind, EstimateKind::Upper);
        // the best zigzag climbs to (1.5, 0) and comes back down: 2 ln 1.5
        assert!((d.value - 2.0 * 1.5f64.ln()).abs() < 1e-9, "{}", d.value);
    }

    #[test]
    fn decreasing_function_is_rejected() {
        let bad = TimeFunction::custom(|x: &Event| -x.t());
        let r = null_distance(&half(), &bad, &e(&[1.0, 0.0]), &e(&[2.0, 0.0]), &Mesh::default());
        assert!(matches!(r, Err(Error::InvalidTimeFunction(_))));
    }
}
