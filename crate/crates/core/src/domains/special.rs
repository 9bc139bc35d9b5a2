//! Domains with closed-form exits, boundary distances and cosmological times.

use serde::{Deserialize, Serialize};

use super::graph::{BaseRegion, GraphDomain, GraphFn, GraphFnSpec};
use super::{CosmoTime, DomainFlags, DomainOracle, Sign};
use crate::error::{Error, Result};
use crate::minkowski::{form, time_separation, Event, Vector};

/// The closed-form domain families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecialDomain {
    /// Chronological future `I+(apex)`.
    ConeFuture { apex: Event },
    /// The side of a spacelike hyperplane through `point` that `normal` points to.
    /// The normal defaults to `d/dt`.
    HalfSpaceFuture {
        point: Event,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normal: Option<Vector>,
    },
    /// `I+(a) ∩ I-(b)` with `a << b`.
    Diamond { a: Event, b: Event },
    /// Complement of the widened past cone `J-_eps(0)` in `R^{1,n}`.
    StableConeComplement { eps: f64, n: usize },
    /// Intersection of the widened cones `I+_eps(a) ∩ I-_eps(b)`.
    StableDiamond { a: Event, b: Event, eps: f64 },
    /// `{t > |(p_1, .., p_{n-ell})|}`.
    Bonsante { ell: usize, n: usize },
    /// `{|t| < height}`.
    SpacelikeSlab { height: f64, n: usize },
}

fn dims_match(a: &Event, b: &Event) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn finite(e: &Event, what: &str) -> Result<()> {
    if !e.is_finite() || e.dim() == 0 {
        return Err(Error::InvalidDomain(format!("{what} must be a finite event with n >= 1")));
    }
    Ok(())
}

/// `(1 + eps)^2`.
fn k2(eps: f64) -> f64 {
    (1.0 + eps) * (1.0 + eps)
}

/// Exit parameter from the widened cone `{(1+eps) t > |p|}` (relative coords
/// `w`, direction `v`); `future = false` flips time to handle past cones.
fn cone_exit(w: &[f64], v: &[f64], eps: f64, future: bool, s_max: f64) -> Option<f64> {
    let sg = if future { 1.0 } else { -1.0 };
    let mut ww: smallvec::SmallVec<[f64; 4]> = w.into();
    let mut vv: smallvec::SmallVec<[f64; 4]> = v.into();
    ww[0] *= sg;
    vv[0] *= sg;
    let a = form(&vv, &vv, eps);
    let b = form(&ww, &vv, eps);
    let c = form(&ww, &ww, eps);
    let v2: f64 = vv.iter().map(|x| x * x).sum();
    smallest_positive_root(a, b, c, v2, |s| ww[0] + s * vv[0] >= 0.0, s_max)
}

/// Smallest `s > 0` with `a s^2 + 2 b s + c = 0` and `accept(s)`.
fn smallest_positive_root(
    a: f64,
    b: f64,
    c: f64,
    v2: f64,
    accept: impl Fn(f64) -> bool,
    s_max: f64,
) -> Option<f64> {
    let mut roots: smallvec::SmallVec<[f64; 2]> = smallvec::SmallVec::new();
    if a.abs() <= 1e-14 * v2 {
        if b != 0.0 {
            roots.push(-c / (2.0 * b));
        }
    } else {
        let disc = b * b - a * c;
        if disc < 0.0 {
            return None;
        }
        let q = -(b + b.signum() * disc.sqrt());
        if q != 0.0 {
            roots.push(q / a);
            roots.push(c / q);
        } else {
            roots.push(0.0);
        }
    }
    roots
        .into_iter()
        .filter(|&s| s > 0.0 && s <= s_max && accept(s))
        .min_by(|x, y| x.total_cmp(y))
}

/// Wick distance to the surface `(1+eps) t = |p|` from a point of the widened cone.
fn cone_boundary_distance(w: &[f64], eps: f64, future: bool) -> f64 {
    let t = if future { w[0] } else { -w[0] };
    let r = w[1..].iter().map(|c| c * c).sum::<f64>().sqrt();
    ((1.0 + eps) * t - r) / (1.0 + k2(eps)).sqrt()
}

fn rel(x: &Event, apex: &Event) -> smallvec::SmallVec<[f64; 4]> {
    x.0.iter().zip(&apex.0).map(|(a, b)| a - b).collect()
}

/// Support of the widened future cone at `apex` for the functional `m`.
fn cone_support(apex: &Event, m: &[f64], eps: f64) -> (f64, f64) {
    let base: f64 = m.iter().zip(&apex.0).map(|(a, b)| a * b).sum();
    let mp = m[1..].iter().map(|c| c * c).sum::<f64>().sqrt();
    let lo = if m[0] >= (1.0 + eps) * mp {
        base
    } else {
        f64::NEG_INFINITY
    };
    let hi = if m[0] <= -(1.0 + eps) * mp {
        base
    } else {
        f64::INFINITY
    };
    (lo, hi)
}

impl SpecialDomain {
    /// Checks the invariants of the variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            SpecialDomain::ConeFuture { apex } => finite(apex, "apex"),
            SpecialDomain::HalfSpaceFuture { point, normal } => {
                finite(point, "point")?;
                if let Some(nv) = normal {
                    if nv.dim() != point.dim() || !nv.is_finite() {
                        return Err(Error::InvalidDomain("normal has the wrong dimension".into()));
                    }
                    if form(&nv.0, &nv.0, 0.0) >= -1e-12 * nv.0.iter().map(|c| c * c).sum::<f64>() {
                        return Err(Error::InvalidDomain("hyperplane normal must be timelike".into()));
                    }
                }
                Ok(())
            }
            SpecialDomain::Diamond { a, b } => {
                finite(a, "a")?;
                finite(b, "b")?;
                dims_match(a, b)?;
                match time_separation(a, b) {
                    Ok(t) if t > 0.0 => Ok(()),
                    _ => Err(Error::InvalidDomain("diamond requires a << b".into())),
                }
            }
            SpecialDomain::StableConeComplement { eps, n } => {
                if !(*eps > 0.0 && eps.is_finite()) || *n == 0 {
                    return Err(Error::InvalidDomain("need eps > 0 and n >= 1".into()));
                }
                Ok(())
            }
            SpecialDomain::StableDiamond { a, b, eps } => {
                finite(a, "a")?;
                finite(b, "b")?;
                dims_match(a, b)?;
                if !(*eps > 0.0 && eps.is_finite()) {
                    return Err(Error::InvalidDomain("need eps > 0".into()));
                }
                let v = b - a;
                if !(v.t() > 0.0 && form(&v.0, &v.0, *eps) < 0.0) {
                    return Err(Error::InvalidDomain("stable diamond requires a <<_eps b".into()));
                }
                Ok(())
            }
            SpecialDomain::Bonsante { ell, n } => {
                if *n == 0 || ell > n {
                    return Err(Error::InvalidDomain("Bonsante domain needs 0 <= ell <= n, n >= 1".into()));
                }
                Ok(())
            }
            SpecialDomain::SpacelikeSlab { height, n } => {
                if !(*height > 0.0 && height.is_finite()) || *n == 0 {
                    return Err(Error::InvalidDomain("slab needs height > 0 and n >= 1".into()));
                }
                Ok(())
            }
        }
    }

    /// The unit hyperplane normal of a half-space (future or past pointing).
    fn halfspace_normal(&self) -> Vector {
        match self {
            SpecialDomain::HalfSpaceFuture { point, normal } => match normal {
                Some(nv) => {
                    let q = -form(&nv.0, &nv.0, 0.0);
                    nv.scale(1.0 / q.sqrt())
                }
                None => Vector::time_unit(point.dim()),
            },
            _ => unreachable!("not a half-space"),
        }
    }

    /// Lorentzian distance `-b(x - point, N)` to the hyperplane of a half-space.
    fn halfspace_tau(&self, x: &Event) -> f64 {
        let SpecialDomain::HalfSpaceFuture { point, .. } = self else {
            unreachable!("not a half-space")
        };
        let nv = self.halfspace_normal();
        -form(&rel(x, point), &nv.0, 0.0)
    }

    fn eps(&self) -> f64 {
        match self {
            SpecialDomain::StableDiamond { eps, .. } | SpecialDomain::StableConeComplement { eps, .. } => {
                *eps
            }
            _ => 0.0,
        }
    }

    /// Number of spatial coordinates entering the Bonsante cone.
    fn bonsante_k(&self) -> usize {
        match self {
            SpecialDomain::Bonsante { ell, n } => n - ell,
            _ => unreachable!(),
        }
    }

    /// Closed-form cosmological time and its maximizing boundary point.
    pub fn cosmo_closed(&self, x: &Event, sign: Sign) -> Result<CosmoTime> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        if !self.contains(x) {
            return Err(Error::OutsideDomain);
        }
        let single = |value: f64, y: Event| CosmoTime {
            value,
            singularity: Some(y),
            unique: true,
        };
        match (self, sign) {
            (SpecialDomain::ConeFuture { apex }, Sign::Past) => {
                Ok(single(time_separation(apex, x)?, apex.clone()))
            }
            (SpecialDomain::ConeFuture { .. }, Sign::Future)
            | (SpecialDomain::HalfSpaceFuture { .. }, Sign::Future)
            | (SpecialDomain::StableConeComplement { .. }, Sign::Future)
            | (SpecialDomain::Bonsante { .. }, Sign::Future) => Ok(CosmoTime::infinite()),
            (SpecialDomain::HalfSpaceFuture { .. }, Sign::Past) => {
                let nv = self.halfspace_normal();
                if nv.t() < 0.0 {
                    return Err(Error::NotApplicable(
                        "past-pointing half-space has no past boundary".into(),
                    ));
                }
                let tau = self.halfspace_tau(x);
                Ok(single(tau, x.offset(&nv, -tau)))
            }
            (SpecialDomain::Diamond { a, .. }, Sign::Past) => Ok(single(time_separation(a, x)?, a.clone())),
            (SpecialDomain::Diamond { b, .. }, Sign::Future) => Ok(single(time_separation(x, b)?, b.clone())),
            (SpecialDomain::StableConeComplement { eps, .. }, Sign::Past) => {
                let kk = k2(*eps);
                let t = x.t();
                let r = x.p().iter().map(|c| c * c).sum::<f64>().sqrt();
                let value = ((1.0 + eps) * t + r) / (kk - 1.0).sqrt();
                let (dir, unique): (Vec<f64>, bool) = if r > 0.0 {
                    (x.p().iter().map(|c| c / r).collect(), true)
                } else {
                    let mut d = vec![0.0; x.dim()];
                    d[0] = 1.0;
                    (d, x.dim() == 0)
                };
                // y = lambda * (-|p|, (1+eps) p) with lambda |p| = (t + (1+eps) r) / ((1+eps)^2 - 1)
                let lr = (t + (1.0 + eps) * r) / (kk - 1.0);
                let p: Vec<f64> = dir.iter().map(|d| lr * (1.0 + eps) * d).collect();
                Ok(CosmoTime {
                    value,
                    singularity: Some(Event::new(-lr, &p)),
                    unique,
                })
            }
            (SpecialDomain::StableDiamond { a, b, eps }, _) => {
                let (apex, future) = match sign {
                    Sign::Past => (a, true),
                    Sign::Future => (b, false),
                };
                Ok(stable_cone_cosmo(apex, x, *eps, future))
            }
            (SpecialDomain::Bonsante { .. }, Sign::Past) => {
                let k = self.bonsante_k();
                let t = x.t();
                let r = x.p()[..k].iter().map(|c| c * c).sum::<f64>().sqrt();
                let mut y = x.clone();
                y.0[0] = 0.0;
                for c in &mut y.0[1..=k] {
                    *c = 0.0;
                }
                Ok(single((t * t - r * r).max(0.0).sqrt(), y))
            }
            (SpecialDomain::SpacelikeSlab { height, .. }, _) => {
                let mut y = x.clone();
                let (value, ty) = match sign {
                    Sign::Past => (x.t() + height, -height),
                    Sign::Future => (height - x.t(), *height),
                };
                y.0[0] = ty;
                Ok(single(value, y))
            }
        }
    }

    /// Two-dimensional containing lightlike diamond of a stable diamond.
    fn enclosing_diamond(&self) -> Option<SpecialDomain> {
        let SpecialDomain::StableDiamond { a, b, eps } = self else {
            return None;
        };
        let k = 1.0 + eps;
        if a.dim() == 1 {
            // vertices: a, b and the two side corners where the eps-lines meet
            let (ta, pa, tb, pb) = (a.t(), a[1], b.t(), b[1]);
            let mut verts = vec![(ta, pa), (tb, pb)];
            // side corners: intersect lower edges from a with upper edges from b
            for s in [1.0, -1.0] {
                // meet t = ta + s (p - pa) / k with t = tb - s (p - pb) / k
                let p = (k * (tb - ta) * s + (pa + pb)) / 2.0;
                let t = ta + s * (p - pa) / k;
                verts.push((t, p));
            }
            let us = verts.iter().map(|(t, p)| t + p);
            let ws = verts.iter().map(|(t, p)| t - p);
            let umin = us.clone().fold(f64::INFINITY, f64::min);
            let umax = us.fold(f64::NEG_INFINITY, f64::max);
            let wmin = ws.clone().fold(f64::INFINITY, f64::min);
            let wmax = ws.fold(f64::NEG_INFINITY, f64::max);
            let to_e = |u: f64, w: f64| Event::new((u + w) / 2.0, &[(u - w) / 2.0]);
            return Some(SpecialDomain::Diamond {
                a: to_e(umin, wmin),
                b: to_e(umax, wmax),
            });
        }
        if a.p() != b.p() {
            return None;
        }
        let half = (b.t() - a.t()) / 2.0;
        let mid = (a.t() + b.t()) / 2.0;
        let reach = k * half;
        Some(SpecialDomain::Diamond {
            a: Event::new(mid - reach, a.p()),
            b: Event::new(mid + reach, a.p()),
        })
    }

    /// Graph description `f- < t < f+` over a base region, when available.
    pub fn to_graph_domain(&self) -> Option<GraphDomain> {
        let n = self.dim();
        let cone = |center: &[f64], offset: f64, slope: f64, dims: Option<usize>| {
            GraphFn::spec(GraphFnSpec::Cone {
                center: center.to_vec(),
                offset,
                slope,
                dims,
            })
        };
        let (base, lower, upper, l_lo, l_hi) = match self {
            SpecialDomain::ConeFuture { apex } => (
                BaseRegion::Whole,
                cone(apex.p(), apex.t(), 1.0, None),
                GraphFn::infinite(),
                1.0,
                0.0,
            ),
            SpecialDomain::HalfSpaceFuture { point, .. } => {
                let nv = self.halfspace_normal();
                if nv.t() <= 0.0 {
                    return None;
                }
                // tau = 0  <=>  t = t0 + N_p . (p - p0) / N_t
                let grad: Vec<f64> = nv.p().iter().map(|c| c / nv.t()).collect();
                let constant = point.t() - grad.iter().zip(point.p()).map(|(g, p)| g * p).sum::<f64>();
                let lip = grad.iter().map(|c| c * c).sum::<f64>().sqrt();
                (
                    BaseRegion::Whole,
                    GraphFn::spec(GraphFnSpec::MaxAffine {
                        pieces: vec![super::graph::AffinePiece {
                            constant,
                            gradient: grad,
                        }],
                    }),
                    GraphFn::infinite(),
                    lip,
                    0.0,
                )
            }
            SpecialDomain::Diamond { a, b } | SpecialDomain::StableDiamond { a, b, .. } => {
                if a.p() != b.p() {
                    return None;
                }
                let k = 1.0 + self.eps();
                let radius = k * (b.t() - a.t()) / 2.0;
                (
                    BaseRegion::Ball {
                        center: a.p().to_vec(),
                        radius,
                    },
                    cone(a.p(), a.t(), 1.0 / k, None),
                    cone(b.p(), b.t(), -1.0 / k, None),
                    1.0 / k,
                    1.0 / k,
                )
            }
            SpecialDomain::StableConeComplement { eps, .. } => (
                BaseRegion::Whole,
                cone(&vec![0.0; n], 0.0, -1.0 / (1.0 + eps), None),
                GraphFn::infinite(),
                1.0 / (1.0 + eps),
                0.0,
            ),
            SpecialDomain::Bonsante { .. } => {
                let k = self.bonsante_k();
                let lower = if k == 0 {
                    GraphFn::spec(GraphFnSpec::Constant { value: 0.0 })
                } else {
                    cone(&vec![0.0; n], 0.0, 1.0, Some(k))
                };
                (BaseRegion::Whole, lower, GraphFn::infinite(), if k == 0 { 0.0 } else { 1.0 }, 0.0)
            }
            SpecialDomain::SpacelikeSlab { height, .. } => (
                BaseRegion::Whole,
                GraphFn::spec(GraphFnSpec::Constant { value: -height }),
                GraphFn::spec(GraphFnSpec::Constant { value: *height }),
                0.0,
                0.0,
            ),
        };
        GraphDomain::new(n, base, lower, upper, l_lo, l_hi).ok()
    }
}

/// Cosmological time toward the widened cone at `apex` (`future = true` for
/// the past boundary of `I+_eps(apex)`).
fn stable_cone_cosmo(apex: &Event, x: &Event, eps: f64, future: bool) -> CosmoTime {
    let k = 1.0 + eps;
    let w = rel(x, apex);
    let t = if future { w[0] } else { -w[0] };
    let r = w[1..].iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut best = (f64::NEG_INFINITY, apex.clone());
    if t >= r {
        best = ((t * t - r * r).sqrt(), apex.clone());
    }
    // smooth critical point on the cone surface, along the spatial direction of x
    let rq = (r - t / k) / (1.0 - 1.0 / (k * k));
    if rq > 0.0 && r > 0.0 {
        let dt = t - rq / k;
        let dr = r - rq;
        if dt >= dr.abs() {
            let val = (dt * dt - dr * dr).sqrt();
            if val > best.0 {
                let sp: Vec<f64> = w[1..].iter().map(|c| c * rq / r).collect();
                let ty = if future { rq / k } else { -rq / k };
                let mut y = Event::new(apex.t() + ty, &sp);
                for (yi, ai) in y.0[1..].iter_mut().zip(apex.p()) {
                    *yi += ai;
                }
                best = (val, y);
            }
        }
    }
    CosmoTime {
        value: best.0.max(0.0),
        singularity: Some(best.1),
        unique: !(r == 0.0 && t < 0.0),
    }
}

impl DomainOracle for SpecialDomain {
    fn dim(&self) -> usize {
        match self {
            SpecialDomain::ConeFuture { apex } => apex.dim(),
            SpecialDomain::HalfSpaceFuture { point, .. } => point.dim(),
            SpecialDomain::Diamond { a, .. } | SpecialDomain::StableDiamond { a, .. } => a.dim(),
            SpecialDomain::StableConeComplement { n, .. }
            | SpecialDomain::Bonsante { n, .. }
            | SpecialDomain::SpacelikeSlab { n, .. } => *n,
        }
    }

    fn contains(&self, x: &Event) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        match self {
            SpecialDomain::ConeFuture { apex } => cone_boundary_distance(&rel(x, apex), 0.0, true) > 0.0,
            SpecialDomain::HalfSpaceFuture { .. } => self.halfspace_tau(x) > 0.0,
            SpecialDomain::Diamond { a, b } | SpecialDomain::StableDiamond { a, b, .. } => {
                let e = self.eps();
                cone_boundary_distance(&rel(x, a), e, true) > 0.0
                    && cone_boundary_distance(&rel(x, b), e, false) > 0.0
            }
            SpecialDomain::StableConeComplement { eps, .. } => {
                let r = x.p().iter().map(|c| c * c).sum::<f64>().sqrt();
                (1.0 + eps) * x.t() + r > 0.0
            }
            SpecialDomain::Bonsante { .. } => {
                let k = self.bonsante_k();
                let r = x.p()[..k].iter().map(|c| c * c).sum::<f64>().sqrt();
                x.t() > r
            }
            SpecialDomain::SpacelikeSlab { height, .. } => x.t().abs() < *height,
        }
    }

    fn flags(&self) -> DomainFlags {
        let f = |convex, causally_convex, future_complete, bounded| DomainFlags {
            convex,
            causally_convex,
            future_complete,
            bounded,
        };
        match self {
            SpecialDomain::ConeFuture { .. } | SpecialDomain::Bonsante { .. } => f(true, true, true, false),
            SpecialDomain::HalfSpaceFuture { .. } => {
                let fc = self.halfspace_normal().t() > 0.0;
                f(true, true, fc, false)
            }
            SpecialDomain::Diamond { .. } | SpecialDomain::StableDiamond { .. } => f(true, true, false, true),
            SpecialDomain::StableConeComplement { .. } => f(false, true, true, false),
            SpecialDomain::SpacelikeSlab { .. } => f(true, true, false, false),
        }
    }

    fn scale(&self) -> f64 {
        match self {
            SpecialDomain::ConeFuture { apex } => 1.0 + apex.0.iter().fold(0.0f64, |m, c| m.max(c.abs())),
            SpecialDomain::HalfSpaceFuture { point, .. } => {
                1.0 + point.0.iter().fold(0.0f64, |m, c| m.max(c.abs()))
            }
            SpecialDomain::Diamond { a, b } | SpecialDomain::StableDiamond { a, b, .. } => {
                super::dist(a, b)
            }
            SpecialDomain::SpacelikeSlab { height, .. } => *height,
            _ => 1.0,
        }
    }

    fn sampling_box(&self) -> (Event, Event) {
        let n = self.dim();
        let around = |c: &Event, lo_t: f64, hi_t: f64, r: f64| {
            let lo = Event::new(c.t() + lo_t, &c.p().iter().map(|p| p - r).collect::<Vec<_>>());
            let hi = Event::new(c.t() + hi_t, &c.p().iter().map(|p| p + r).collect::<Vec<_>>());
            (lo, hi)
        };
        match self {
            SpecialDomain::ConeFuture { apex } => around(apex, 0.0, 2.0, 2.0),
            SpecialDomain::HalfSpaceFuture { point, .. } => around(point, -2.0, 2.0, 2.0),
            SpecialDomain::Diamond { a, b } | SpecialDomain::StableDiamond { a, b, .. } => {
                let mid = a.lerp(b, 0.5);
                let r = (1.0 + self.eps()) * super::dist(a, b) / 2.0;
                around(&mid, -r, r, r)
            }
            SpecialDomain::StableConeComplement { .. } => around(&Event::origin(n), -1.0, 2.0, 2.0),
            SpecialDomain::Bonsante { .. } => around(&Event::origin(n), 0.0, 2.0, 2.0),
            SpecialDomain::SpacelikeSlab { height, .. } => {
                around(&Event::origin(n), -height, *height, 2.0 * height.max(1.0))
            }
        }
    }

    fn center(&self) -> Event {
        let n = self.dim();
        match self {
            SpecialDomain::ConeFuture { apex } => apex.offset(&Vector::time_unit(n), 1.0),
            SpecialDomain::HalfSpaceFuture { point, .. } => point.offset(&self.halfspace_normal(), 1.0),
            SpecialDomain::Diamond { a, b } | SpecialDomain::StableDiamond { a, b, .. } => a.lerp(b, 0.5),
            SpecialDomain::StableConeComplement { .. } | SpecialDomain::Bonsante { .. } => {
                Event::origin(n).offset(&Vector::time_unit(n), 1.0)
            }
            SpecialDomain::SpacelikeSlab { .. } => Event::origin(n),
        }
    }

    fn distance_to_boundary(&self, x: &Event) -> f64 {
        match self {
            SpecialDomain::ConeFuture { apex } => cone_boundary_distance(&rel(x, apex), 0.0, true),
            SpecialDomain::HalfSpaceFuture { .. } => {
                let nv = self.halfspace_normal();
                // Euclidean normal of {-b(z, N) = 0} is (N_t, -N_p)
                self.halfspace_tau(x) / nv.0.iter().map(|c| c * c).sum::<f64>().sqrt()
            }
            SpecialDomain::Diamond { a, b } | SpecialDomain::StableDiamond { a, b, .. } => {
                let e = self.eps();
                cone_boundary_distance(&rel(x, a), e, true).min(cone_boundary_distance(&rel(x, b), e, false))
            }
            SpecialDomain::StableConeComplement { eps, .. } => {
                let k = 1.0 + eps;
                let t = x.t();
                let r = x.p().iter().map(|c| c * c).sum::<f64>().sqrt();
                if -t + k * r > 0.0 {
                    (k * t + r) / (1.0 + k * k).sqrt()
                } else {
                    (t * t + r * r).sqrt()
                }
            }
            SpecialDomain::Bonsante { .. } => {
                let k = self.bonsante_k();
                let r = x.p()[..k].iter().map(|c| c * c).sum::<f64>().sqrt();
                if k == 0 {
                    x.t()
                } else {
                    (x.t() - r) / 2f64.sqrt()
                }
            }
            SpecialDomain::SpacelikeSlab { height, .. } => height - x.t().abs(),
        }
    }

    fn exit_param(&self, x: &Event, v: &[f64], s_max: f64) -> Option<f64> {
        match self {
            SpecialDomain::ConeFuture { apex } => cone_exit(&rel(x, apex), v, 0.0, true, s_max),
            SpecialDomain::HalfSpaceFuture { point, .. } => {
                let nv = self.halfspace_normal();
                let rate = -form(v, &nv.0, 0.0);
                let tau = -form(&rel(x, point), &nv.0, 0.0);
                (rate < 0.0).then(|| -tau / rate).filter(|&s| s <= s_max)
            }
            SpecialDomain::Diamond { a, b } | SpecialDomain::StableDiamond { a, b, .. } => {
                let e = self.eps();
                let s1 = cone_exit(&rel(x, a), v, e, true, s_max);
                let s2 = cone_exit(&rel(x, b), v, e, false, s_max);
                match (s1, s2) {
                    (Some(p), Some(q)) => Some(p.min(q)),
                    (p, q) => p.or(q),
                }
            }
            SpecialDomain::StableConeComplement { eps, .. } => {
                let a = form(v, v, *eps);
                let b = form(&x.0, v, *eps);
                let c = form(&x.0, &x.0, *eps);
                let v2: f64 = v.iter().map(|c| c * c).sum();
                smallest_positive_root(a, b, c, v2, |s| x.t() + s * v[0] <= 0.0, s_max)
            }
            SpecialDomain::Bonsante { .. } => {
                let k = self.bonsante_k();
                if k == 0 {
                    return (v[0] < 0.0).then(|| -x.t() / v[0]).filter(|&s| s <= s_max);
                }
                cone_exit(&x.0[..=k], &v[..=k], 0.0, true, s_max)
            }
            SpecialDomain::SpacelikeSlab { height, .. } => {
                let s = if v[0] > 0.0 {
                    (height - x.t()) / v[0]
                } else if v[0] < 0.0 {
                    (-height - x.t()) / v[0]
                } else {
                    return None;
                };
                (s <= s_max).then_some(s)
            }
        }
    }

    fn support(&self, m: &[f64]) -> (f64, f64) {
        let full = (f64::NEG_INFINITY, f64::INFINITY);
        match self {
            SpecialDomain::ConeFuture { apex } => cone_support(apex, m, 0.0),
            SpecialDomain::HalfSpaceFuture { point, .. } => {
                // bounded on one side only when m is parallel to the Euclidean normal
                let nv = self.halfspace_normal();
                let mut en: Vec<f64> = nv.0.to_vec();
                for c in &mut en[1..] {
                    *c = -*c;
                }
                let enorm = en.iter().map(|c| c * c).sum::<f64>().sqrt();
                let mnorm = m.iter().map(|c| c * c).sum::<f64>().sqrt();
                let dot: f64 = m.iter().zip(&en).map(|(a, b)| a * b).sum();
                // parallel up to rounding: any genuine tilt leaves m unbounded both ways
                let tilt = (0..m.len())
                    .flat_map(|i| (0..i).map(move |j| (i, j)))
                    .map(|(i, j)| (m[i] * en[j] - m[j] * en[i]).abs())
                    .fold(0.0, f64::max);
                let parallel = tilt <= 4.0 * f64::EPSILON * enorm * mnorm;
                let base: f64 = m.iter().zip(&point.0).map(|(a, b)| a * b).sum();
                if parallel && dot > 0.0 {
                    (base, f64::INFINITY)
                } else if parallel && dot < 0.0 {
                    (f64::NEG_INFINITY, base)
                } else {
                    full
                }
            }
            SpecialDomain::Diamond { a, b } | SpecialDomain::StableDiamond { a, b, .. } => {
                diamond_support(a, b, self.eps(), m)
            }
            SpecialDomain::StableConeComplement { .. } => full,
            SpecialDomain::Bonsante { .. } => {
                let k = self.bonsante_k();
                if m[k + 1..].iter().any(|&c| c != 0.0) {
                    return full;
                }
                if k == 0 {
                    return match m[0] {
                        c if c > 0.0 => (0.0, f64::INFINITY),
                        c if c < 0.0 => (f64::NEG_INFINITY, 0.0),
                        _ => full,
                    };
                }
                let apex = Event::origin(k);
                cone_support(&apex, &m[..=k], 0.0)
            }
            SpecialDomain::SpacelikeSlab { height, .. } => {
                if m[1..].iter().any(|&c| c != 0.0) || m[0] == 0.0 {
                    full
                } else {
                    (-height * m[0].abs(), height * m[0].abs())
                }
            }
        }
    }

    fn containers(&self) -> Vec<SpecialDomain> {
        let mut out = vec![self.clone()];
        match self {
            SpecialDomain::StableDiamond { .. } => out.extend(self.enclosing_diamond()),
            SpecialDomain::SpacelikeSlab { height, n } => {
                out.push(SpecialDomain::HalfSpaceFuture {
                    point: Event::new(-height, &vec![0.0; *n]),
                    normal: None,
                });
                let mut past = Vector::zeros(*n);
                past.0[0] = -1.0;
                out.push(SpecialDomain::HalfSpaceFuture {
                    point: Event::new(*height, &vec![0.0; *n]),
                    normal: Some(past),
                });
            }
            SpecialDomain::Bonsante { n, .. } => out.push(SpecialDomain::HalfSpaceFuture {
                point: Event::origin(*n),
                normal: None,
            }),
            _ => {}
        }
        out
    }

    fn cosmological(&self, x: &Event, sign: Sign) -> Result<CosmoTime> {
        self.cosmo_closed(x, sign)
    }

    fn as_special(&self) -> Option<&SpecialDomain> {
        Some(self)
    }

    fn graph_form(&self) -> Option<GraphDomain> {
        self.to_graph_domain()
    }
}

/// Support of the widened past cone at `apex`.
/// Rim point of `I+_eps(a) ∩ I-_eps(b)` above spatial unit direction `theta`.
fn rim_point(a: &Event, b: &Event, eps: f64, theta: &[f64]) -> Vec<f64> {
    let k = 1.0 + eps;
    let dt = b.t() - a.t();
    let dp: Vec<f64> = b.p().iter().zip(a.p()).map(|(x, y)| x - y).collect();
    let dp2: f64 = dp.iter().map(|c| c * c).sum();
    let th_dp: f64 = theta.iter().zip(&dp).map(|(x, y)| x * y).sum();
    let s = (k * k * dt * dt - dp2) / (2.0 * k * (k * dt - th_dp));
    let mut x = Vec::with_capacity(a.0.len());
    x.push(a.t() + s);
    x.extend(a.p().iter().zip(theta).map(|(p, th)| p + s * k * th));
    x
}

/// Support interval of a (widened) diamond: the extreme points are the two
/// tips and the rim where the cone boundaries meet.
fn diamond_support(a: &Event, b: &Event, eps: f64, m: &[f64]) -> (f64, f64) {
    let dot = |x: &[f64]| m.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
    let n = a.dim();
    let (mut lo, mut hi) = (dot(&a.0).min(dot(&b.0)), dot(&a.0).max(dot(&b.0)));
    let on_rim = |v: &[f64]| {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let th: Vec<f64> = v.iter().map(|c| c / norm).collect();
        Some(dot(&rim_point(a, b, eps, &th)))
    };
    if n == 1 {
        for th in [1.0, -1.0] {
            let v = dot(&rim_point(a, b, eps, &[th]));
            lo = lo.min(v);
            hi = hi.max(v);
        }
        return (lo, hi);
    }
    // the rim value is a smooth function on the sphere: seed with the
    // direction of m's spatial part, then polish with a local search
    for sign in [1.0, -1.0] {
        let mut seeds: Vec<Vec<f64>> = crate::sampling::sphere_directions(n, 64);
        let mp: Vec<f64> = m[1..].iter().map(|c| sign * c).collect();
        if mp.iter().any(|c| *c != 0.0) {
            seeds.push(mp);
        }
        let f = |v: &[f64]| on_rim(v).map_or(f64::INFINITY, |x| -sign * x);
        let best = seeds
            .into_iter()
            .min_by(|u, v| f(u).total_cmp(&f(v)))
            .expect("seed directions");
        let (v, _) = crate::optim::minimize(&f, &best, 0.1);
        for cand in [best, v] {
            if let Some(x) = on_rim(&cand) {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{boundary_distance, cosmological_time, initial_singularity, ray_exit};
    use crate::minkowski::Endpoint;

    fn e(c: &[f64]) -> Event {
        Event::from_slice(c)
    }

    #[test]
    fn diamond_support_matches_sampled_members() {
        let d = SpecialDomain::StableDiamond {
            a: e(&[-1.0, 0.2, 0.0]),
            b: e(&[1.0, 0.0, 0.5]),
            eps: 1.0,
        };
        let mut r = crate::sampling::rng(3);
        for m in [[1.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.3, -1.0, 0.7]] {
            let (lo, hi) = d.support(&m);
            let (blo, bhi) = d.sampling_box();
            let mut seen = (f64::INFINITY, f64::NEG_INFINITY);
            for _ in 0..200_000 {
                let x = crate::sampling::uniform_in_box(&mut r, &blo, &bhi);
                if d.contains(&x) {
                    let v: f64 = m.iter().zip(&x.0).map(|(a, b)| a * b).sum();
                    assert!(v >= lo - 1e-9 && v <= hi + 1e-9, "{v} outside ({lo}, {hi})");
                    seen = (seen.0.min(v), seen.1.max(v));
                }
            }
            assert!(seen.0 - lo < 0.05 * (hi - lo) && hi - seen.1 < 0.05 * (hi - lo));
        }
    }

    fn halfspace() -> SpecialDomain {
        SpecialDomain::HalfSpaceFuture {
            point: e(&[0.0, 0.0]),
            normal: None,
        }
    }

    fn diamond() -> SpecialDomain {
        SpecialDomain::Diamond {
            a: e(&[-1.0, 0.0]),
            b: e(&[1.0, 0.0]),
        }
    }

    fn close(a: &Event, b: &Event, tol: f64) -> bool {
        crate::minkowski::wick_distance(a, b) < tol
    }

    #[test]
    fn ray_exit_examples() {
        let h = halfspace();
        let x = e(&[1.0, 0.0]);
        match ray_exit(&h, &x, &Vector::from_slice(&[-1.0, 1.0]), Sign::Future).unwrap() {
            Endpoint::Finite(y) => assert!(close(&y, &e(&[0.0, 1.0]), 1e-12)),
            _ => panic!("expected finite exit"),
        }
        let v = Vector::from_slice(&[1.0, 1.0]);
        assert_eq!(ray_exit(&h, &x, &v, Sign::Future).unwrap(), Endpoint::Infinite);
        match ray_exit(&diamond(), &e(&[0.0, 0.0]), &v, Sign::Future).unwrap() {
            Endpoint::Finite(y) => assert!(close(&y, &e(&[0.5, 0.5]), 1e-12)),
            _ => panic!("expected finite exit"),
        }
        assert_eq!(ray_exit(&h, &e(&[-1.0, 0.0]), &v, Sign::Future), Err(Error::OutsideDomain));
        assert_eq!(ray_exit(&h, &x, &Vector::zeros(1), Sign::Future), Err(Error::ZeroVector));
    }

    #[test]
    fn boundary_distance_examples() {
        assert!((boundary_distance(&halfspace(), &e(&[1.0, 0.0])).unwrap() - 1.0).abs() < 1e-15);
        let r = boundary_distance(&diamond(), &e(&[0.0, 0.0])).unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-15);
        let cone = SpecialDomain::ConeFuture { apex: e(&[0.0, 0.0]) };
        let r = boundary_distance(&cone, &e(&[1.0, 0.0])).unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cosmological_examples() {
        let om = SpecialDomain::StableConeComplement { eps: 1.0, n: 1 };
        let x = e(&[2.0, 1.0]);
        let tau = cosmological_time(&om, &x, Sign::Past).unwrap();
        assert!((tau - 5.0 / 3f64.sqrt()).abs() < 1e-12);
        let (y, unique) = initial_singularity(&om, &x, Sign::Past).unwrap();
        assert!(unique);
        assert!(close(&y, &e(&[-4.0 / 3.0, 8.0 / 3.0]), 1e-12));
        assert!((time_separation(&y, &x).unwrap() - tau).abs() < 1e-12);

        let cone = SpecialDomain::ConeFuture { apex: e(&[0.0, 0.0]) };
        assert!((cosmological_time(&cone, &e(&[1.0, 0.0]), Sign::Past).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosmological_time(&cone, &e(&[1.0, 0.0]), Sign::Future).unwrap(), f64::INFINITY);
        assert!(initial_singularity(&cone, &e(&[1.0, 0.0]), Sign::Future).is_err());
        let (y, _) = initial_singularity(&cone, &e(&[1.0, 0.0]), Sign::Past).unwrap();
        assert_eq!(y, e(&[0.0, 0.0]));

        let d = diamond();
        assert!((cosmological_time(&d, &e(&[0.0, 0.0]), Sign::Past).unwrap() - 1.0).abs() < 1e-15);
        assert!((cosmological_time(&d, &e(&[0.0, 0.0]), Sign::Future).unwrap() - 1.0).abs() < 1e-15);

        let (y, _) = initial_singularity(&halfspace(), &e(&[2.0, 3.0]), Sign::Past).unwrap();
        assert!(close(&y, &e(&[0.0, 3.0]), 1e-15));
    }

    #[test]
    fn invalid_variants_are_rejected() {
        let bad = SpecialDomain::Diamond {
            a: e(&[0.0, 0.0]),
            b: e(&[0.0, 1.0]),
        };
        assert!(bad.validate().is_err());
        assert!(SpecialDomain::StableConeComplement { eps: 0.0, n: 1 }.validate().is_err());
        assert!(SpecialDomain::Bonsante { ell: 3, n: 2 }.validate().is_err());
        assert!(SpecialDomain::SpacelikeSlab { height: -1.0, n: 1 }.validate().is_err());
        assert!(diamond().validate().is_ok());
    }

    #[test]
    fn omega_eps_is_the_complement_of_the_past_cone() {
        let om = SpecialDomain::StableConeComplement { eps: 1.0, n: 1 };
        assert!(om.contains(&e(&[-1.0, 3.0])));
        assert!(!om.contains(&e(&[-1.0, 1.0])));
        assert!(om.contains(&e(&[1.0, 0.0])));
    }

    #[test]
    fn enclosing_diamond_contains_stable_diamond() {
        let sd = SpecialDomain::StableDiamond {
            a: e(&[-1.0, 0.2]),
            b: e(&[1.0, -0.1]),
            eps: 1.0,
        };
        let big = sd.enclosing_diamond().unwrap();
        let (lo, hi) = sd.sampling_box();
        let mut hits = 0;
        for i in 0..60 {
            for j in 0..60 {
                let x = e(&[
                    lo.t() + (hi.t() - lo.t()) * (i as f64 + 0.5) / 60.0,
                    lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / 60.0,
                ]);
                if sd.contains(&x) {
                    hits += 1;
                    assert!(big.contains(&x), "{x:?}");
                }
            }
        }
        assert!(hits > 100);
    }

    #[test]
    fn serde_round_trip() {
        let d = SpecialDomain::StableDiamond {
            a: e(&[-1.0, 0.0]),
            b: e(&[1.0, 0.0]),
            eps: 1.0,
        };
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<SpecialDomain>(&s).unwrap(), d);
        assert!(serde_json::from_str::<SpecialDomain>(r#"{"type":"cone_future","apex":[0,0],"x":1}"#).is_err());
    }
}
