//! Stable acausality of sampled spacelike graphs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::Event;

/// Outcome of [`stable_acausality_epsilon`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AcausalityVerdict {
    /// Sampled Lipschitz quotient is zero: a spacelike hyperplane piece.
    AcausalForAllEps,
    /// Acausal for the widened cones of every `eps' < eps`.
    StablyAcausal { eps: f64, lipschitz: f64 },
    /// Quotient reaches 1 (within `1e-9`): some pair is causally related.
    NotStablyAcausal { lipschitz: f64 },
}

/// Samples `(f(p), p)` on a regular grid over the box `[lo, hi]`.
pub fn sample_graph_surface(
    f: impl Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    per_axis: usize,
) -> Vec<Event> {
    let n = lo.len();
    let m = per_axis.max(2);
    let total = m.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut p = vec![0.0; n];
            for i in (0..n).rev() {
                let j = k % m;
                k /= m;
                p[i] = lo[i] + (hi[i] - lo[i]) * j as f64 / (m - 1) as f64;
            }
            Event::new(f(&p), &p)
        })
        .collect()
}

/// Largest `eps` for which the sampled surface stays acausal for `b_eps`.
///
/// With `L = max |dt| / |dp|` over sample pairs the answer is `1/L - 1`.
pub fn stable_acausality_epsilon(samples: &[Event]) -> Result<AcausalityVerdict> {
    if samples.len() < 2 {
        return Err(Error::DegenerateSample("need at least two surface samples".into()));
    }
    let n = samples[0].dim();
    if let Some(bad) = samples.iter().find(|s| s.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    let lip = (0..samples.len())
        .into_par_iter()
        .map(|i| {
            let a = &samples[i];
            let mut m = 0.0f64;
            for b in &samples[i + 1..] {
                let dt = (a.t() - b.t()).abs();
                let dp = a.p().iter().zip(b.p()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                if dp == 0.0 {
                    if dt > 0.0 {
                        return f64::INFINITY;
                    }
                    continue;
                }
                m = m.max(dt / dp);
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    Ok(if lip == 0.0 {
        AcausalityVerdict::AcausalForAllEps
    } else if lip >= 1.0 - 1e-9 {
        AcausalityVerdict::NotStablyAcausal { lipschitz: lip }
    } else {
        AcausalityVerdict::StablyAcausal {
            eps: 1.0 / lip - 1.0,
            lipschitz: lip,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(l: f64) -> impl Fn(&[f64]) -> f64 {
        move |p: &[f64]| l * p.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    #[test]
    fn examples() {
        let s = sample_graph_surface(cone(0.5), &[-1.0, -1.0], &[1.0, 1.0], 21);
        match stable_acausality_epsilon(&s).unwrap() {
            AcausalityVerdict::StablyAcausal { eps, .. } => assert!((eps - 1.0).abs() < 1e-9),
            v => panic!("{v:?}"),
        }
        let s = sample_graph_surface(cone(1.0), &[-1.0, -1.0], &[1.0, 1.0], 21);
        assert!(matches!(
            stable_acausality_epsilon(&s).unwrap(),
            AcausalityVerdict::NotStablyAcausal { .. }
        ));
        let s = sample_graph_surface(|_| 0.0, &[-1.0], &[1.0], 11);
        assert_eq!(stable_acausality_epsilon(&s).unwrap(), AcausalityVerdict::AcausalForAllEps);
        assert!(stable_acausality_epsilon(&s[..1]).is_err());
    }

    #[test]
    fn vertical_pair_is_causal() {
        let s = vec![Event::new(0.0, &[0.0]), Event::new(1.0, &[0.0])];
        assert!(matches!(
            stable_acausality_epsilon(&s).unwrap(),
            AcausalityVerdict::NotStablyAcausal { .. }
        ));
    }
}
