//! Damped Newton iteration for smooth convex objectives.

use serde::{Deserialize, Serialize};

use super::linalg::{Lu, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{dot, max_abs, Scalar};

/// A twice-differentiable objective.
pub trait SmoothObjective<T: Scalar> {
    fn dim(&self) -> usize;
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T]) -> Vec<T>;
    fn hessian(&self, x: &[T]) -> Matrix<T>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub grad_tol: f64,
    pub max_iter: usize,
    pub armijo_c: f64,
    pub backtrack: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iter: 200,
            armijo_c: 1e-4,
            backtrack: 0.5,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.grad_tol > 0.0
            && self.max_iter > 0
            && self.armijo_c > 0.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad Newton config {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonResult<T> {
    pub x: Vec<T>,
    pub value: T,
    /// `max_i |∂f/∂x_i|` at `x`.
    pub residual: T,
    pub iterations: usize,
}

fn axpy<T: Scalar>(x: &[T], t: T, d: &[T]) -> Vec<T> {
    x.iter().zip(d).map(|(&xi, &di)| xi + t * di).collect()
}

/// Newton direction, regularised when the Hessian is singular and replaced by
/// steepest descent when even that fails to give a descent direction.
fn direction<T: Scalar>(h: &Matrix<T>, g: &[T]) -> Vec<T> {
    let neg_g: Vec<T> = g.iter().map(|&v| -v).collect();
    if let Ok(lu) = Lu::new(h) {
        let d = lu.solve(&neg_g);
        if d.iter().all(|v| v.is_finite()) && dot(g, &d) < T::zero() {
            return d;
        }
    }
    let n = g.len();
    let diag_scale = (0..n).fold(T::one(), |m, i| m.max(h[(i, i)].abs()));
    let tau = T::tol(1e-10) * diag_scale;
    let mut reg = h.clone();
    for i in 0..n {
        reg[(i, i)] = reg[(i, i)] + tau;
    }
    if let Ok(lu) = Lu::new(&reg) {
        let d = lu.solve(&neg_g);
        if d.iter().all(|v| v.is_finite()) && dot(g, &d) < T::zero() {
            return d;
        }
    }
    neg_g
}

/// Minimise `f` from `x0` with Armijo backtracking.
///
/// Stops when `‖∇f‖∞ ≤ grad_tol`. Near the optimum, where objective
/// differences drop below round-off, a full step is accepted whenever it
/// reduces the gradient norm.
pub fn newton_minimize<T: Scalar, F: SmoothObjective<T> + ?Sized>(
    f: &F,
    x0: &[T],
    cfg: &NewtonConfig,
) -> Result<NewtonResult<T>> {
    cfg.validate()?;
    if x0.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x0.len(),
        });
    }
    let grad_tol = T::tol(cfg.grad_tol);
    let c = T::lit(cfg.armijo_c);
    let shrink = T::lit(cfg.backtrack);

    let mut x = x0.to_vec();
    let mut fx = f.value(&x);
    let mut g = f.gradient(&x);
    let mut res = max_abs(&g);
    for it in 0..cfg.max_iter {
        if res <= grad_tol {
            return Ok(NewtonResult {
                x,
                value: fx,
                residual: res,
                iterations: it,
            });
        }
        if !fx.is_finite() || !res.is_finite() {
            break;
        }
        let d = direction(&f.hessian(&x), &g);
        let slope = dot(&g, &d);
        let slack = T::tol(1e-12) * (T::one() + fx.abs());
        let mut accepted = None;
        // Full step first. Near the optimum the objective change drops below
        // round-off and Armijo turns into noise, so a full step that keeps the
        // value within round-off and shrinks the gradient is taken as is.
        let full = axpy(&x, T::one(), &d);
        let f_full = f.value(&full);
        if f_full.is_finite() && f_full <= fx + slack {
            let g_full = f.gradient(&full);
            if f_full <= fx + c * slope || max_abs(&g_full) < res {
                accepted = Some((full, f_full));
            }
        }
        let mut t = shrink;
        for _ in 0..80 {
            if accepted.is_some() {
                break;
            }
            let trial = axpy(&x, t, &d);
            let ft = f.value(&trial);
            if ft.is_finite() && ft <= fx + c * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t = t * shrink;
        }
        match accepted {
            Some((xn, fnew)) => {
                x = xn;
                fx = fnew;
                g = f.gradient(&x);
                res = max_abs(&g);
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations: it,
                    residual: res.to_f64_lossy(),
                })
            }
        }
    }
    if res <= grad_tol {
        return Ok(NewtonResult {
            x,
            value: fx,
            residual: res,
            iterations: cfg.max_iter,
        });
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual: res.to_f64_lossy(),
    })
}

/// Objective assembled from closures.
pub struct FnObjective<V, G, H> {
    pub dim: usize,
    pub value: V,
    pub gradient: G,
    pub hessian: H,
}

impl<T, V, G, H> SmoothObjective<T> for FnObjective<V, G, H>
where
    T: Scalar,
    V: Fn(&[T]) -> T,
    G: Fn(&[T]) -> Vec<T>,
    H: Fn(&[T]) -> Matrix<T>,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[T]) -> T {
        (self.value)(x)
    }
    fn gradient(&self, x: &[T]) -> Vec<T> {
        (self.gradient)(x)
    }
    fn hessian(&self, x: &[T]) -> Matrix<T> {
        (self.hessian)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::linalg::solve;

    #[test]
    fn cosh_sum_minimised_at_origin() {
        let f = FnObjective {
            dim: 3,
            value: |x: &[f64]| x.iter().map(|v| v.cosh()).sum::<f64>() - 3.0,
            gradient: |x: &[f64]| x.iter().map(|v| v.sinh()).collect(),
            hessian: |x: &[f64]| Matrix::from_fn(3, 3, |i, j| if i == j { x[i].cosh() } else { 0.0 }),
        };
        let r = newton_minimize(&f, &[1.5, -2.0, 0.3], &NewtonConfig::default()).unwrap();
        assert!(r.x.iter().all(|v| v.abs() < 1e-10));
        assert!(r.value.abs() < 1e-15);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn quadratic_matches_linear_solve() {
        let a = Matrix::from_rows(&[
            vec![3.0, 1.0, 0.5],
            vec![1.0, 2.0, 0.25],
            vec![0.5, 0.25, 1.5],
        ]);
        let b = vec![1.0, -2.0, 0.5];
        let f = FnObjective {
            dim: 3,
            value: |x: &[f64]| 0.5 * dot(x, &a.mul_vec(x)) - dot(&b, x),
            gradient: |x: &[f64]| {
                a.mul_vec(x).iter().zip(&b).map(|(u, v)| u - v).collect()
            },
            hessian: |_: &[f64]| a.clone(),
        };
        let r = newton_minimize(&f, &[0.0; 3], &NewtonConfig::default()).unwrap();
        let oracle = solve(&a, &b).unwrap();
        for (u, v) in r.x.iter().zip(&oracle) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn unbounded_objective_fails() {
        // linear function has no minimiser
        let f = FnObjective {
            dim: 1,
            value: |x: &[f64]| -x[0],
            gradient: |_: &[f64]| vec![-1.0],
            hessian: |_: &[f64]| Matrix::zeros(1, 1),
        };
        let cfg = NewtonConfig {
            max_iter: 20,
            ..Default::default()
        };
        assert!(matches!(
            newton_minimize(&f, &[0.0], &cfg),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn singular_hessian_direction_still_descends() {
        // f(x, y) = cosh(x) - 1, flat in y
        let f = FnObjective {
            dim: 2,
            value: |x: &[f64]| x[0].cosh() - 1.0,
            gradient: |x: &[f64]| vec![x[0].sinh(), 0.0],
            hessian: |x: &[f64]| Matrix::from_rows(&[vec![x[0].cosh(), 0.0], vec![0.0, 0.0]]),
        };
        let r = newton_minimize(&f, &[2.0, 5.0], &NewtonConfig::default()).unwrap();
        assert!(r.x[0].abs() < 1e-10);
        assert_eq!(r.x[1], 5.0);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = NewtonConfig {
            backtrack: 1.5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
