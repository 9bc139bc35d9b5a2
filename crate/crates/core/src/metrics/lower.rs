//! Certified lower bounds on the Markowitz distance.
//!
//! An affine functional `m` maps the domain into an interval `J`, so the
//! projective distance of `J` between the images bounds the distance from
//! below. A special domain containing the domain with a closed-form distance
//! gives another bound.

use serde::{Deserialize, Serialize};

use super::{DistanceEstimate, EstimateKind, Witness};
use crate::domains::{DomainOracle, SpecialDomain};
use crate::error::{Error, Result};
use crate::minkowski::{rho_interval, Event, ProjectiveInterval};
use crate::oracles::exact_distance;
use crate::optim::minimize;
use crate::sampling::sphere_directions;

/// Which witnesses to try.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerWitnesses {
    /// Sampled functional directions in `R^{n+1}`.
    pub directions: usize,
    /// Polish the best functional with a local search.
    pub refine: bool,
    pub containers: bool,
    /// Additional functionals supplied by the caller.
    pub functionals: Vec<Vec<f64>>,
}

impl Default for LowerWitnesses {
    fn default() -> Self {
        LowerWitnesses {
            directions: 64,
            refine: true,
            containers: true,
            functionals: Vec::new(),
        }
    }
}

fn functional_bound<D: DomainOracle + ?Sized>(omega: &D, m: &[f64], x: &Event, y: &Event) -> Option<(f64, f64, f64)> {
    let (lo, hi) = omega.support(m);
    let j = ProjectiveInterval::new(lo, hi).ok()?;
    let lx: f64 = m.iter().zip(&x.0).map(|(a, b)| a * b).sum();
    let ly: f64 = m.iter().zip(&y.0).map(|(a, b)| a * b).sum();
    rho_interval(&j, lx, ly).ok().map(|v| (v, lo, hi))
}

/// Covector of the hyperplane bounding a half-space, oriented into it.
fn halfspace_covector(h: &SpecialDomain) -> Option<Vec<f64>> {
    let SpecialDomain::HalfSpaceFuture { point, normal } = h else {
        return None;
    };
    let mut m = match normal {
        Some(nv) => nv.0.to_vec(),
        None => {
            let mut v = vec![0.0; point.dim() + 1];
            v[0] = 1.0;
            v
        }
    };
    for c in &mut m[1..] {
        *c = -*c;
    }
    Some(m)
}

/// Largest certified lower bound found among the witnesses; 0 without a witness.
pub fn markowitz_lower<D: DomainOracle + ?Sized>(
    omega: &D,
    x: &Event,
    y: &Event,
    witnesses: &LowerWitnesses,
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
    let mesh = format!(
        "directions={};refine={};containers={}",
        witnesses.directions, witnesses.refine, witnesses.containers
    );
    let mut best = DistanceEstimate {
        value: 0.0,
        kind: EstimateKind::Lower,
        mesh,
        witness: None,
    };
    if x == y {
        return Ok(best);
    }
    let n1 = omega.dim() + 1;
    let containers = if witnesses.containers {
        omega.containers()
    } else {
        Vec::new()
    };

    let mut candidates: Vec<Vec<f64>> = witnesses.functionals.clone();
    let mut et = vec![0.0; n1];
    et[0] = 1.0;
    candidates.push(et);
    for i in 1..n1 {
        for s in [1.0, -1.0] {
            let mut m = vec![0.0; n1];
            m[0] = 1.0;
            m[i] = s;
            candidates.push(m);
        }
    }
    candidates.extend(containers.iter().filter_map(halfspace_covector));
    candidates.extend(sphere_directions(n1, witnesses.directions));

    let mut best_m: Option<Vec<f64>> = None;
    for m in candidates {
        if let Some((v, lo, hi)) = functional_bound(omega, &m, x, y) {
            if v > best.value {
                best.value = v;
                best.witness = Some(Witness::Functional {
                    m: m.clone(),
                    lower: lo,
                    upper: hi,
                });
                best_m = Some(m);
            }
        }
    }
    if witnesses.refine {
        if let Some(m0) = best_m {
            let f = |m: &[f64]| functional_bound(omega, m, x, y).map_or(0.0, |b| -b.0);
            let (m, fm) = minimize(&f, &m0, 0.05);
            if -fm > best.value {
                if let Some((v, lo, hi)) = functional_bound(omega, &m, x, y) {
                    best.value = v;
                    best.witness = Some(Witness::Functional { m, lower: lo, upper: hi });
                }
            }
        }
    }
    for c in containers {
        if let Some(v) = exact_distance(&c, x, y) {
            if v > best.value {
                best.value = v;
                best.witness = Some(Witness::Container(c));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn e(c: &[f64]) -> Event {
        Event::from_slice(c)
    }

    #[test]
    fn half_space_time_functional_is_tight() {
        let h = SpecialDomain::HalfSpaceFuture {
            point: e(&[0.0, 0.0]),
            normal: None,
        };
        let w = LowerWitnesses {
            containers: false,
            ..Default::default()
        };
        let lb = markowitz_lower(&h, &e(&[1.0, 0.0]), &e(&[E, 0.0]), &w).unwrap();
        assert!((lb.value - 1.0).abs() < 1e-12);
        assert!(matches!(lb.witness, Some(Witness::Functional { .. })));
    }

    #[test]
    fn diamond_container_witness() {
        let d = SpecialDomain::Diamond {
            a: e(&[-1.0, 0.0]),
            b: e(&[1.0, 0.0]),
        };
        let lb = markowitz_lower(&d, &e(&[0.0, 0.0]), &e(&[0.5, 0.0]), &LowerWitnesses::default()).unwrap();
        assert!((lb.value - 9f64.ln()).abs() < 1e-12);
        assert!(matches!(lb.witness, Some(Witness::Container(_))));
        let z = markowitz_lower(&d, &e(&[0.1, 0.0]), &e(&[0.1, 0.0]), &LowerWitnesses::default()).unwrap();
        assert_eq!(z.value, 0.0);
    }
}
