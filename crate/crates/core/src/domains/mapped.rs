//! Images of domains under similarities.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{shooting_distance, CosmoTime, DomainFlags, DomainOracle, Sign, SpecialDomain};
use crate::error::{Error, Result};
use crate::minkowski::{apply_conformal, ConformalMap, Event, Vector};

/// The image `g(inner)` of a domain under a similarity `g`.
#[derive(Clone, Debug)]
pub struct MappedDomain {
    inner: Arc<dyn DomainOracle>,
    g: ConformalMap,
    ginv: ConformalMap,
    lambda: f64,
    a: DMatrix<f64>,
    /// Extreme singular values of `lambda * A`.
    sigma: (f64, f64),
}

impl MappedDomain {
    pub fn new(inner: Arc<dyn DomainOracle>, g: ConformalMap) -> Result<Self> {
        let ConformalMap::Similarity { lambda, a, .. } = &g else {
            return Err(Error::InvalidMap("only similarities map domains here".into()));
        };
        if a.nrows() != inner.dim() + 1 {
            return Err(Error::DimensionMismatch {
                expected: inner.dim() + 1,
                found: a.nrows(),
            });
        }
        let sv = a.clone().svd(false, false).singular_values;
        let sigma = (sv.min() * lambda, sv.max() * lambda);
        Ok(MappedDomain {
            ginv: g.inverse()?,
            lambda: *lambda,
            a: a.clone(),
            inner,
            g,
            sigma,
        })
    }

    pub fn map(&self) -> &ConformalMap {
        &self.g
    }

    pub fn inner(&self) -> &Arc<dyn DomainOracle> {
        &self.inner
    }

    fn pull(&self, x: &Event) -> Event {
        apply_conformal(&self.ginv, x).expect("similarity is total")
    }

    fn push(&self, x: &Event) -> Event {
        apply_conformal(&self.g, x).expect("similarity is total")
    }

    fn pull_vector(&self, v: &[f64]) -> Vec<f64> {
        self.ginv
            .apply_vector(&Vector(v.into()))
            .expect("similarity is linear")
            .0
            .to_vec()
    }

    /// True when the map is a Euclidean similarity as well (no boost part).
    fn wick_conformal(&self) -> bool {
        self.sigma.1 - self.sigma.0 <= 1e-12 * self.sigma.1
    }

    fn map_special(&self, s: &SpecialDomain) -> Option<SpecialDomain> {
        if !self.g.preserves_time_orientation() {
            return None;
        }
        let spatial_only = (1..self.a.nrows()).all(|i| self.a[(0, i)].abs() < 1e-12 && self.a[(i, 0)].abs() < 1e-12);
        Some(match s {
            SpecialDomain::ConeFuture { apex } => SpecialDomain::ConeFuture { apex: self.push(apex) },
            SpecialDomain::Diamond { a, b } => SpecialDomain::Diamond {
                a: self.push(a),
                b: self.push(b),
            },
            SpecialDomain::HalfSpaceFuture { point, normal } => {
                let nv = normal.clone().unwrap_or_else(|| Vector::time_unit(point.dim()));
                SpecialDomain::HalfSpaceFuture {
                    point: self.push(point),
                    normal: Some(self.g.apply_vector(&nv).ok()?),
                }
            }
            SpecialDomain::StableDiamond { a, b, eps } if spatial_only => SpecialDomain::StableDiamond {
                a: self.push(a),
                b: self.push(b),
                eps: *eps,
            },
            _ => return None,
        })
    }
}

impl DomainOracle for MappedDomain {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn contains(&self, x: &Event) -> bool {
        x.dim() == self.dim() && self.inner.contains(&self.pull(x))
    }

    fn flags(&self) -> DomainFlags {
        let mut f = self.inner.flags();
        if !self.g.preserves_time_orientation() {
            f.future_complete = false;
        }
        f
    }

    fn scale(&self) -> f64 {
        self.inner.scale() * self.sigma.1
    }

    fn sampling_box(&self) -> (Event, Event) {
        let (lo, hi) = self.inner.sampling_box();
        let d = lo.dim() + 1;
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for c in 0..(1usize << d.min(12)) {
            let corner = Event((0..d).map(|i| if (c >> i) & 1 == 1 { hi[i] } else { lo[i] }).collect());
            let y = self.push(&corner);
            for i in 0..d {
                min[i] = min[i].min(y[i]);
                max[i] = max[i].max(y[i]);
            }
        }
        (Event::from_slice(&min), Event::from_slice(&max))
    }

    fn center(&self) -> Event {
        self.push(&self.inner.center())
    }

    fn distance_to_boundary(&self, x: &Event) -> f64 {
        if self.wick_conformal() {
            self.sigma.0 * self.inner.distance_to_boundary(&self.pull(x))
        } else {
            shooting_distance(self, x)
        }
    }

    fn clearance(&self, x: &Event) -> f64 {
        self.sigma.0 * self.inner.clearance(&self.pull(x))
    }

    fn exit_param(&self, x: &Event, v: &[f64], s_max: f64) -> Option<f64> {
        self.inner.exit_param(&self.pull(x), &self.pull_vector(v), s_max)
    }

    fn support(&self, m: &[f64]) -> (f64, f64) {
        // <m, lambda A z + tau> = <lambda A^T m, z> + <m, tau>
        let ConformalMap::Similarity { tau, .. } = &self.g else {
            unreachable!("constructor only accepts similarities")
        };
        let col = DMatrix::from_column_slice(m.len(), 1, m);
        let pulled: Vec<f64> = (self.a.transpose() * col * self.lambda).iter().copied().collect();
        let shift: f64 = m.iter().zip(&tau.0).map(|(a, b)| a * b).sum();
        let (lo, hi) = self.inner.support(&pulled);
        (lo + shift, hi + shift)
    }

    fn containers(&self) -> Vec<SpecialDomain> {
        self.inner
            .containers()
            .iter()
            .filter_map(|s| self.map_special(s))
            .collect()
    }

    fn cosmological(&self, x: &Event, sign: Sign) -> Result<CosmoTime> {
        let flip = !self.g.preserves_time_orientation();
        let inner_sign = match (sign, flip) {
            (s, false) => s,
            (Sign::Past, true) => Sign::Future,
            (Sign::Future, true) => Sign::Past,
        };
        let c = self.inner.cosmological(&self.pull(x), inner_sign)?;
        Ok(CosmoTime {
            value: c.value * self.lambda,
            singularity: c.singularity.map(|y| self.push(&y)),
            unique: c.unique,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{boundary_distance, ray_exit};
    use crate::minkowski::Endpoint;

    #[test]
    fn dilated_halfspace_behaves_like_the_original() {
        let h: Arc<dyn DomainOracle> = Arc::new(SpecialDomain::HalfSpaceFuture {
            point: Event::new(0.0, &[0.0]),
            normal: None,
        });
        let m = MappedDomain::new(h, ConformalMap::dilation(1, 3.0).unwrap()).unwrap();
        let x = Event::new(3.0, &[0.0]);
        assert!((boundary_distance(&m, &x).unwrap() - 3.0).abs() < 1e-12);
        match ray_exit(&m, &x, &Vector::from_slice(&[-1.0, 1.0]), Sign::Future).unwrap() {
            Endpoint::Finite(y) => assert!((y.t()).abs() < 1e-12 && (y[1] - 3.0).abs() < 1e-12),
            _ => panic!(),
        }
        assert_eq!(m.containers().len(), 1);
    }

    #[test]
    fn boosted_cone_keeps_its_apex() {
        let c: Arc<dyn DomainOracle> = Arc::new(SpecialDomain::ConeFuture {
            apex: Event::new(0.0, &[0.0]),
        });
        let g = ConformalMap::similarity(1.0, ConformalMap::boost_matrix(1, 1, 0.7), Vector::zeros(1)).unwrap();
        let m = MappedDomain::new(c, g).unwrap();
        let x = Event::new(2.0, &[0.5]);
        assert!(m.contains(&x));
        let tau = m.cosmological(&x, Sign::Past).unwrap().value;
        assert!((tau - (4.0f64 - 0.25).sqrt()).abs() < 1e-12);
    }
}
