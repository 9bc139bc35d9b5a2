//! The Hilbert distance of a convex domain with the full log cross-ratio normalization.

use crate::domains::{exit_pair, DomainOracle};
use crate::error::{Error, Result};
use crate::minkowski::{cross_ratio_params, Event};

/// Log cross-ratio of `x, y` against the exits of the straight line through them.
///
/// The line may have any causal character. Fails with [`Error::Degenerate`]
/// when the whole line lies in the domain.
pub fn hilbert_distance<D: DomainOracle + ?Sized>(omega: &D, x: &Event, y: &Event) -> Result<f64> {
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
    if !omega.flags().convex {
        return Err(Error::NotApplicable("the Hilbert distance needs a convex domain".into()));
    }
    if x == y {
        return Ok(0.0);
    }
    let v: Vec<f64> = y.0.iter().zip(&x.0).map(|(a, b)| a - b).collect();
    let (back, fwd) = exit_pair(omega, x, &v);
    if back.is_none() && fwd.is_none() {
        return Err(Error::Degenerate);
    }
    Ok(cross_ratio_params(back, fwd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::SpecialDomain;

    fn e(c: &[f64]) -> Event {
        Event::from_slice(c)
    }

    #[test]
    fn diamond_example() {
        let d = SpecialDomain::Diamond {
            a: e(&[-1.0, 0.0]),
            b: e(&[1.0, 0.0]),
        };
        let h = hilbert_distance(&d, &e(&[0.0, 0.0]), &e(&[0.0, 0.5])).unwrap();
        assert!((h - 3f64.ln()).abs() < 1e-10);
        assert_eq!(hilbert_distance(&d, &e(&[0.1, 0.2]), &e(&[0.1, 0.2])).unwrap(), 0.0);
    }

    #[test]
    fn half_space_spacelike_line_is_degenerate() {
        let h = SpecialDomain::HalfSpaceFuture {
            point: e(&[0.0, 0.0]),
            normal: None,
        };
        assert!(matches!(
            hilbert_distance(&h, &e(&[1.0, 0.0]), &e(&[1.0, 3.0])),
            Err(Error::Degenerate)
        ));
        let v = hilbert_distance(&h, &e(&[1.0, 0.0]), &e(&[std::f64::consts::E, 0.0])).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
