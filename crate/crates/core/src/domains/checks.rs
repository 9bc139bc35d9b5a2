//! Sampled verification of causal convexity, future completeness and the
//! absence of complete lightlike lines.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{exit_pair, horizon, DomainOracle};
use crate::minkowski::{causally_precedes, Event};
use crate::sampling::{rng, sample_members, sphere_directions, uniform_in_box};

/// Sample sizes for [`causal_structure_checks`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    /// Causal member pairs whose diamonds are probed.
    pub pairs: usize,
    /// Probe points per diamond.
    pub probes: usize,
    /// Members from which rays are shot.
    pub members: usize,
    /// Directions per member.
    pub directions: usize,
    pub seed: u64,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            pairs: 200,
            probes: 64,
            members: 64,
            directions: 32,
            seed: 42,
        }
    }
}

/// Outcome of the sampled structure checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub causally_convex: bool,
    pub future_complete: bool,
    pub lightlike_line_free: bool,
}

/// Runs the three sampled checks on `omega`.
pub fn causal_structure_checks<D: DomainOracle + ?Sized>(omega: &D, params: &CheckParams) -> StructureReport {
    let n = omega.dim();
    let mut r = rng(params.seed);
    let members = sample_members(omega, params.members.max(2), 0.0, &mut r);

    let dirs = sphere_directions(n, 16);
    let mut causally_convex = true;
    'pairs: for _ in 0..params.pairs {
        let x = &members[r.gen_range(0..members.len())];
        // a future timelike partner of x inside the domain
        let u = &dirs[r.gen_range(0..dirs.len())];
        let speed: f64 = r.gen_range(0.0..0.95);
        let len = omega.scale() * r.gen_range(0.01..1.0);
        let y = Event(
            std::iter::once(x.t() + len)
                .chain(x.p().iter().zip(u).map(|(p, c)| p + len * speed * c))
                .collect(),
        );
        if !omega.contains(&y) {
            continue;
        }
        let lo = Event(x.0.iter().zip(&y.0).map(|(a, b)| a.min(*b) - (b - a).abs()).collect());
        let hi = Event(x.0.iter().zip(&y.0).map(|(a, b)| a.max(*b) + (b - a).abs()).collect());
        let mut hit = 0;
        for _ in 0..params.probes * 20 {
            let z = uniform_in_box(&mut r, &lo, &hi);
            if causally_precedes(x, &z) && causally_precedes(&z, &y) {
                hit += 1;
                if !omega.contains(&z) {
                    causally_convex = false;
                    break 'pairs;
                }
                if hit >= params.probes {
                    break;
                }
            }
        }
    }

    let mut future_complete = true;
    let mut lightlike_line_free = true;
    for x in &members {
        let s_max = horizon(omega, x);
        for u in sphere_directions(n, params.directions) {
            // future causal direction with random speed, then the lightlike one
            let speed: f64 = r.gen_range(0.0..1.0);
            let timelike: Vec<f64> = std::iter::once(1.0).chain(u.iter().map(|c| c * speed)).collect();
            if future_complete && omega.exit_param(x, &timelike, s_max).is_some() {
                future_complete = false;
            }
            let null: Vec<f64> = std::iter::once(1.0).chain(u.iter().copied()).collect();
            if future_complete && omega.exit_param(x, &null, s_max).is_some() {
                future_complete = false;
            }
            if lightlike_line_free {
                let (back, fwd) = exit_pair(omega, x, &null);
                if back.is_none() && fwd.is_none() {
                    lightlike_line_free = false;
                }
            }
        }
    }
    StructureReport {
        causally_convex,
        future_complete,
        lightlike_line_free,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::SpecialDomain;

    fn check(d: &SpecialDomain) -> StructureReport {
        causal_structure_checks(d, &CheckParams::default())
    }

    #[test]
    fn examples() {
        let diamond = SpecialDomain::Diamond {
            a: Event::new(-1.0, &[0.0]),
            b: Event::new(1.0, &[0.0]),
        };
        assert_eq!(
            check(&diamond),
            StructureReport {
                causally_convex: true,
                future_complete: false,
                lightlike_line_free: true
            }
        );
        let half = SpecialDomain::HalfSpaceFuture {
            point: Event::new(0.0, &[0.0, 0.0]),
            normal: None,
        };
        assert_eq!(
            check(&half),
            StructureReport {
                causally_convex: true,
                future_complete: true,
                lightlike_line_free: true
            }
        );
        let bonsante = SpecialDomain::Bonsante { ell: 1, n: 2 };
        let r = check(&bonsante);
        assert!(r.causally_convex && r.future_complete);
    }

    #[test]
    fn slab_is_not_future_complete() {
        let r = check(&SpecialDomain::SpacelikeSlab { height: 1.0, n: 1 });
        assert!(r.causally_convex && !r.future_complete && r.lightlike_line_free);
    }

    #[test]
    fn omega_eps_is_causally_convex() {
        let r = check(&SpecialDomain::StableConeComplement { eps: 1.0, n: 1 });
        assert!(r.causally_convex && r.future_complete);
    }
}
