//! Derivative-free local minimization.

use argmin::core::{CostFunction, Error as ArgminError, Executor, State};
use argmin::solver::neldermead::NelderMead;

struct Objective<'a, F>(&'a F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, ArgminError> {
        Ok((self.0)(p))
    }
}

/// Minimizes `f` with Nelder–Mead from an axis-aligned simplex of size `step` at `x0`.
///
/// Returns the best point and value seen; never worse than `f(x0)`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    step: f64,
    max_iters: u64,
    tol: f64,
) -> (Vec<f64>, f64) {
    let f0 = f(x0);
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let solver = match NelderMead::new(simplex).with_sd_tolerance(tol) {
        Ok(s) => s,
        Err(_) => return (x0.to_vec(), f0),
    };
    let run = Executor::new(Objective(f), solver)
        .configure(|s| s.max_iters(max_iters))
        .run();
    match run {
        Ok(res) => {
            let st = res.state();
            match st.get_best_param() {
                Some(p) if st.get_best_cost() < f0 => (p.clone(), st.get_best_cost()),
                _ => (x0.to_vec(), f0),
            }
        }
        Err(_) => (x0.to_vec(), f0),
    }
}

/// Nelder–Mead followed by restarts with shrinking simplices.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], step: f64) -> (Vec<f64>, f64) {
    let (mut x, mut fx) = nelder_mead(f, x0, step, 2000, 1e-14);
    let mut s = step * 0.1;
    for _ in 0..3 {
        let (y, fy) = nelder_mead(f, &x, s, 2000, 1e-15);
        if fy <= fx {
            x = y;
            fx = fy;
        }
        s *= 0.1;
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_the_minimum_of_a_quadratic() {
        let f = |p: &[f64]| (p[0] - 1.0).powi(2) + 3.0 * (p[1] + 2.0).powi(2);
        let (x, fx) = minimize(&f, &[0.0, 0.0], 0.5);
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] + 2.0).abs() < 1e-6);
        assert!(fx < 1e-10);
    }

    #[test]
    fn one_dimensional_kink() {
        let f = |p: &[f64]| (p[0] - 0.3).abs();
        let (x, _) = minimize(&f, &[2.0], 0.5);
        assert!((x[0] - 0.3).abs() < 1e-8);
    }
}
