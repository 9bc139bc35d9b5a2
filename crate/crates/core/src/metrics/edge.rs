//! The Finsler density on lightlike vectors and the cost of a lightlike segment.

use crate::domains::{exit_pair, DomainOracle};
use crate::error::{Error, Result};
use crate::minkowski::{classify_raw, cross_ratio_params, CausalKind, Event, Vector};

fn member<D: DomainOracle + ?Sized>(omega: &D, x: &Event) -> Result<()> {
    if x.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: x.dim(),
        });
    }
    if !omega.contains(x) {
        return Err(Error::OutsideDomain);
    }
    Ok(())
}

fn require_lightlike(v: &[f64]) -> Result<()> {
    if classify_raw(v, 0.0).kind != CausalKind::Lightlike {
        let q = crate::minkowski::form(v, v, 0.0);
        return Err(Error::NotLightlike { defect: q.abs() });
    }
    Ok(())
}

/// `|v| / d(x, x_v-) + |v| / d(x, x_v+)`, a term dropped when its exit is at infinity.
pub fn infinitesimal_markowitz<D: DomainOracle + ?Sized>(omega: &D, x: &Event, v: &Vector) -> Result<f64> {
    member(omega, x)?;
    if v.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: v.dim(),
        });
    }
    if v.is_zero() {
        return Ok(0.0);
    }
    require_lightlike(&v.0)?;
    let (back, fwd) = exit_pair(omega, x, &v.0);
    Ok(back.map_or(0.0, |s| 1.0 / s) + fwd.map_or(0.0, |s| 1.0 / s))
}

/// Exit parameters of the line through `p` along `v` and the cost of `[p, p + v]`.
///
/// Returns `None` when the segment leaves the domain.
#[inline]
pub(crate) fn segment_cost_raw<D: DomainOracle + ?Sized>(omega: &D, p: &Event, v: &[f64]) -> Option<SegmentCost> {
    let (back, fwd) = exit_pair(omega, p, v);
    if fwd.is_some_and(|s| s <= 1.0) {
        return None;
    }
    Some(SegmentCost {
        cost: cross_ratio_params(back, fwd),
        complete_line: back.is_none() && fwd.is_none(),
    })
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SegmentCost {
    pub cost: f64,
    /// Both exits at infinity: the line lies entirely in the domain.
    pub complete_line: bool,
}

/// Log cross-ratio of `p, q` against the exits of their lightlike line.
pub fn markowitz_edge_cost<D: DomainOracle + ?Sized>(omega: &D, p: &Event, q: &Event) -> Result<f64> {
    member(omega, p)?;
    member(omega, q)?;
    let v = q - p;
    if v.is_zero() {
        return Ok(0.0);
    }
    require_lightlike(&v.0)?;
    segment_cost_raw(omega, p, &v.0)
        .map(|c| c.cost)
        .ok_or(Error::SegmentLeavesDomain)
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
    fn infinitesimal_examples() {
        let v = Vector::from_slice(&[1.0, 1.0]);
        let x = e(&[1.0, 0.0]);
        assert!((infinitesimal_markowitz(&half(), &x, &v).unwrap() - 1.0).abs() < 1e-12);
        let cone = SpecialDomain::ConeFuture { apex: e(&[0.0, 0.0]) };
        // past exit at (0.5, -0.5): s = 1/2 in units of v, so 1/s = 2
        assert!((infinitesimal_markowitz(&cone, &x, &v).unwrap() - 2.0).abs() < 1e-12);
        let a = infinitesimal_markowitz(&cone, &x, &v).unwrap();
        let b = infinitesimal_markowitz(&cone, &x, &v.scale(2.0)).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12);
        assert!(matches!(
            infinitesimal_markowitz(&cone, &x, &Vector::from_slice(&[1.0, 0.0])),
            Err(Error::NotLightlike { .. })
        ));
    }

    #[test]
    fn edge_cost_examples() {
        let p = e(&[1.0, 1.0]);
        let q = e(&[E, E]);
        assert!((markowitz_edge_cost(&half(), &p, &q).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(markowitz_edge_cost(&half(), &p, &p).unwrap(), 0.0);
        // interior segment of the diamond parallel to the edge from (0,-1) to (1,0):
        // exits at parameters -2 and 2 around p at 0, q at 1 give ln 3
        let d = SpecialDomain::Diamond {
            a: e(&[-1.0, 0.0]),
            b: e(&[1.0, 0.0]),
        };
        let p = e(&[0.0, 0.0]);
        let q = e(&[0.25, 0.25]);
        assert!((markowitz_edge_cost(&d, &p, &q).unwrap() - 3f64.ln()).abs() < 1e-12);
        let far = e(&[2.0, 2.0]);
        assert!(markowitz_edge_cost(&d, &p, &far).is_err());
    }
}
