//! Closed-form Markowitz distances and cosmological times for special domains.

use crate::domains::{DomainOracle, Sign, SpecialDomain};
use crate::error::{Error, Result};
use crate::minkowski::{causally_related, form, time_separation, Event};

fn same_dim(a: &Event, b: &Event) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `2 |ln(T(a, y) / T(a, x))|` for causally related `x, y` in the future of `a`.
pub fn delta_cone_future(a: &Event, x: &Event, y: &Event) -> Result<f64> {
    same_dim(a, x)?;
    same_dim(a, y)?;
    if x == y {
        return Ok(0.0);
    }
    let tx = time_separation(a, x)?;
    let ty = time_separation(a, y)?;
    if !(tx > 0.0 && ty > 0.0) {
        return Err(Error::OutsideDomain);
    }
    if !causally_related(x, y) {
        return Err(Error::NotCausal);
    }
    Ok(2.0 * (ty / tx).ln().abs())
}

/// `|ln(tau(y) / tau(x))|` with `tau` the Lorentzian distance to the hyperplane,
/// for causally related `x, y`.
pub fn delta_halfspace(h: &SpecialDomain, x: &Event, y: &Event) -> Result<f64> {
    if !matches!(h, SpecialDomain::HalfSpaceFuture { .. }) {
        return Err(Error::NotApplicable("expected a half-space".into()));
    }
    // a past-pointing half-space measures time toward its future boundary
    let sign = match h.cosmo_closed(x, Sign::Past) {
        Err(Error::NotApplicable(_)) => Sign::Future,
        _ => Sign::Past,
    };
    let tx = h.cosmo_closed(x, sign)?.value;
    let ty = h.cosmo_closed(y, sign)?.value;
    if x == y {
        return Ok(0.0);
    }
    if !causally_related(x, y) {
        return Err(Error::NotCausal);
    }
    Ok((ty / tx).ln().abs())
}

/// Markowitz distance in a lightlike diamond of `R^{1,1}`.
///
/// Causal pairs use the projective time `T(a, .)^2 / T(., b)^2`; spacelike
/// pairs use the side corners `e1, e2` where the boundary lines of `a` and `b` meet.
pub fn delta_diamond_2d(a: &Event, b: &Event, x: &Event, y: &Event) -> Result<f64> {
    for e in [a, b, x, y] {
        if e.dim() != 1 {
            return Err(Error::NotApplicable("the diamond formula is for dimension 1+1".into()));
        }
    }
    let d = SpecialDomain::Diamond {
        a: a.clone(),
        b: b.clone(),
    };
    d.validate()?;
    if !d.contains(x) || !d.contains(y) {
        return Err(Error::OutsideDomain);
    }
    if x == y {
        return Ok(0.0);
    }
    if causally_related(x, y) {
        let tau = |z: &Event| -> Result<f64> {
            let num = time_separation(a, z)?;
            let den = time_separation(z, b)?;
            Ok(2.0 * (num / den).ln())
        };
        return Ok((tau(y)? - tau(x)?).abs());
    }
    let (ua, wa) = (a.t() + a[1], a.t() - a[1]);
    let (ub, wb) = (b.t() + b[1], b.t() - b[1]);
    let from_null = |u: f64, w: f64| Event::new(0.5 * (u + w), &[0.5 * (u - w)]);
    let e1 = from_null(ua, wb);
    let e2 = from_null(ub, wa);
    let q = |p: &Event, e: &Event| {
        let v = p - e;
        form(&v.0, &v.0, 0.0).abs()
    };
    Ok((q(x, &e1) * q(y, &e2) / (q(y, &e1) * q(x, &e2))).ln().abs())
}

/// Past cosmological time of `x` in a special domain.
pub fn cosmo_time_closed(variant: &SpecialDomain, x: &Event) -> Result<f64> {
    Ok(variant.cosmo_closed(x, Sign::Past)?.value)
}

/// A special domain read as one with a closed-form Markowitz distance.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactFormula {
    domain: SpecialDomain,
}

/// `|ln((u_y - lo)/(u_x - lo))|`-type projective distance on an interval.
fn rho(lo: f64, hi: f64, s: f64, t: f64) -> f64 {
    let left = if lo.is_finite() { ((t - lo) / (s - lo)).ln() } else { 0.0 };
    let right = if hi.is_finite() { ((hi - s) / (hi - t)).ln() } else { 0.0 };
    (left + right).abs()
}

impl ExactFormula {
    /// Recognizes domains with a closed form on at least some pairs.
    pub fn new(domain: &SpecialDomain) -> Option<Self> {
        let canonical = match domain {
            SpecialDomain::ConeFuture { .. } | SpecialDomain::HalfSpaceFuture { .. } => domain.clone(),
            SpecialDomain::Diamond { a, .. } if a.dim() == 1 => domain.clone(),
            SpecialDomain::Bonsante { ell, n } if *ell == 0 => SpecialDomain::ConeFuture {
                apex: Event::origin(*n),
            },
            SpecialDomain::Bonsante { ell, n } if ell == n => SpecialDomain::HalfSpaceFuture {
                point: Event::origin(*n),
                normal: None,
            },
            _ => return None,
        };
        Some(ExactFormula { domain: canonical })
    }

    pub fn domain(&self) -> &SpecialDomain {
        &self.domain
    }

    /// Whether the formula covers the pair (both points must be members).
    pub fn applies(&self, x: &Event, y: &Event) -> bool {
        if x.dim() != self.domain.dim() || y.dim() != self.domain.dim() {
            return false;
        }
        if !self.domain.contains(x) || !self.domain.contains(y) {
            return false;
        }
        match &self.domain {
            SpecialDomain::ConeFuture { .. } => x.dim() == 1 || causally_related(x, y),
            SpecialDomain::HalfSpaceFuture { .. } => causally_related(x, y),
            SpecialDomain::Diamond { .. } => true,
            _ => false,
        }
    }

    /// The exact distance on an applicable pair.
    pub fn evaluate(&self, x: &Event, y: &Event) -> Result<f64> {
        if !self.applies(x, y) {
            return Err(Error::NotApplicable("the pair is outside the formula's range".into()));
        }
        match &self.domain {
            SpecialDomain::ConeFuture { apex } => {
                if causally_related(x, y) {
                    return delta_cone_future(apex, x, y);
                }
                let u0 = apex.t() + apex[1];
                let w0 = apex.t() - apex[1];
                let (ux, wx) = (x.t() + x[1], x.t() - x[1]);
                let (uy, wy) = (y.t() + y[1], y.t() - y[1]);
                Ok(rho(u0, f64::INFINITY, ux, uy) + rho(w0, f64::INFINITY, wx, wy))
            }
            SpecialDomain::HalfSpaceFuture { .. } => delta_halfspace(&self.domain, x, y),
            SpecialDomain::Diamond { a, b } => delta_diamond_2d(a, b, x, y),
            _ => unreachable!("constructor admits only the variants above"),
        }
    }
}

/// Exact distance when a closed form covers the pair.
pub fn exact_distance(domain: &SpecialDomain, x: &Event, y: &Event) -> Option<f64> {
    let f = ExactFormula::new(domain)?;
    f.applies(x, y).then(|| f.evaluate(x, y).ok()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn e(c: &[f64]) -> Event {
        Event::from_slice(c)
    }

    #[test]
    fn cone_examples() {
        let o = e(&[0.0, 0.0]);
        assert!((delta_cone_future(&o, &e(&[1.0, 0.0]), &e(&[E, 0.0])).unwrap() - 2.0).abs() < 1e-12);
        assert!((delta_cone_future(&o, &e(&[1.0, 0.0]), &e(&[2.0, 0.0])).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(delta_cone_future(&o, &e(&[1.0, 0.0]), &e(&[1.0, 0.0])).unwrap(), 0.0);
        assert!(matches!(
            delta_cone_future(&o, &e(&[1.0, -0.5]), &e(&[1.0, 0.5])),
            Err(Error::NotCausal)
        ));
    }

    #[test]
    fn halfspace_examples() {
        let h = SpecialDomain::HalfSpaceFuture {
            point: e(&[0.0, 0.0]),
            normal: None,
        };
        assert!((delta_halfspace(&h, &e(&[1.0, 0.0]), &e(&[E * E, 0.0])).unwrap() - 2.0).abs() < 1e-12);
        assert!((delta_halfspace(&h, &e(&[1.0, 0.0]), &e(&[2.0, 1.0])).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn diamond_examples() {
        let (a, b) = (e(&[-1.0, 0.0]), e(&[1.0, 0.0]));
        let d = delta_diamond_2d(&a, &b, &e(&[0.0, 0.0]), &e(&[0.0, 0.5])).unwrap();
        assert!((d - 9f64.ln()).abs() < 1e-12);
        let d = delta_diamond_2d(&a, &b, &e(&[0.0, 0.0]), &e(&[0.5, 0.0])).unwrap();
        assert!((d - 9f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cosmo_examples() {
        let omega = SpecialDomain::StableConeComplement { eps: 1.0, n: 1 };
        assert!((cosmo_time_closed(&omega, &e(&[2.0, 1.0])).unwrap() - 5.0 / 3f64.sqrt()).abs() < 1e-12);
        let cone = SpecialDomain::ConeFuture { apex: e(&[0.0, 0.0]) };
        assert!((cosmo_time_closed(&cone, &e(&[3.0, 0.0])).unwrap() - 3.0).abs() < 1e-12);
        let h = SpecialDomain::HalfSpaceFuture {
            point: e(&[0.0, 0.0]),
            normal: None,
        };
        assert!((cosmo_time_closed(&h, &e(&[2.0, 7.0])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cone_product_formula_matches_causal_formula() {
        let cone = ExactFormula::new(&SpecialDomain::ConeFuture { apex: e(&[0.0, 0.0]) }).unwrap();
        let (x, y) = (e(&[1.0, 0.2]), e(&[3.0, -0.5]));
        let causal = cone.evaluate(&x, &y).unwrap();
        let ux = (x.t() + x[1], x.t() - x[1]);
        let uy = (y.t() + y[1], y.t() - y[1]);
        let product = (uy.0 / ux.0).ln().abs() + (uy.1 / ux.1).ln().abs();
        assert!((causal - product).abs() < 1e-12);
    }
}
