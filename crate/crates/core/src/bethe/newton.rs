//! Damped Newton iteration for complex root systems.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Iteration stops once `max |f|` drops below this.
    pub tol: f64,
    /// Central-difference step of the Jacobian.
    pub step: f64,
    /// Cap on the modulus of each component of a Newton step.
    pub max_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 100,
            tol: 1e-13,
            step: 1e-7,
            max_step: 0.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    /// `max |f(x)|` at the returned point.
    pub residual: f64,
    /// `max |f|` after every iteration, starting with the initial guess.
    pub trace: Vec<f64>,
}

fn max_abs(f: &[C64]) -> f64 {
    f.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Solve `f(x) = 0` from `initial`.
///
/// The system is treated as `2n` real equations in `2n` real unknowns, so `f`
/// need not be holomorphic. Steps are halved until the residual decreases.
pub fn newton_solve<F>(f: F, initial: &[C64], opts: &NewtonOptions) -> Result<NewtonOutcome>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let n = initial.len();
    let mut x = initial.to_vec();
    let mut fx = f(&x)?;
    if fx.len() != n {
        return Err(Error::invalid(format!(
            "{} equations for {n} unknowns",
            fx.len()
        )));
    }
    let mut res = max_abs(&fx);
    let mut trace = vec![res];
    let mut iterations = 0;
    while !(res < opts.tol) && iterations < opts.max_iter {
        if !res.is_finite() {
            break;
        }
        iterations += 1;
        let h = opts.step;
        let mut jac = Mat::<f64>::zeros(2 * n, 2 * n);
        for c in 0..2 * n {
            let dir = if c < n {
                C64::new(h, 0.0)
            } else {
                C64::new(0.0, h)
            };
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[c % n] += dir;
            xm[c % n] -= dir;
            let (fp, fm) = (f(&xp)?, f(&xm)?);
            for r in 0..n {
                let d = (fp[r] - fm[r]) / (2.0 * h);
                jac[(r, c)] = d.re;
                jac[(r + n, c)] = d.im;
            }
        }
        let mut rhs = Mat::<f64>::zeros(2 * n, 1);
        for r in 0..n {
            rhs[(r, 0)] = -fx[r].re;
            rhs[(r + n, 0)] = -fx[r].im;
        }
        let dx = jac.partial_piv_lu().solve(&rhs);
        if (0..2 * n).any(|r| !dx[(r, 0)].is_finite()) {
            break;
        }

        let longest = (0..n)
            .map(|r| dx[(r, 0)].hypot(dx[(r + n, 0)]))
            .fold(0.0, f64::max);
        let mut t = if longest > opts.max_step {
            opts.max_step / longest
        } else {
            1.0
        };
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<C64> = (0..n)
                .map(|r| x[r] + t * C64::new(dx[(r, 0)], dx[(r + n, 0)]))
                .collect();
            if let Ok(ft) = f(&trial) {
                let rt = max_abs(&ft);
                if rt < res || (rt.is_finite() && t < 1e-8) {
                    x = trial;
                    fx = ft;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        trace.push(res);
        if !accepted {
            break;
        }
    }
    if res < opts.tol {
        Ok(NewtonOutcome {
            x,
            iterations,
            residual: res,
            trace,
        })
    } else {
        Err(Error::Convergence {
            iterations,
            residual: res,
        })
    }
}
