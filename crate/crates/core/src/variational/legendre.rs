//! Numerical Legendre transform of a Hamiltonian and the random probes that
//! certify convexity and reversibility on an instance.

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{Gauge, Hamiltonian};
use crate::error::{Error, Result};
use crate::scalar::{max_abs, Scalar};
use crate::solvers::{newton_minimize, Lu, Matrix, NewtonConfig, SmoothObjective};

/// `𝓛(j) = sup_ξ {⟨j, ξ⟩ − ℋ(ξ)}` together with the maximiser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianValue<T> {
    pub value: T,
    /// Optimal tilt; for gauge-invariant Hamiltonians it has zero sum.
    pub xi: Vec<T>,
    /// `‖∇ℋ(ξ) − j‖∞`
    pub residual: T,
    pub iterations: usize,
}

/// `ξ ↦ ℋ(ξ) − ⟨j, ξ⟩`, plus `½(Σξ)²` to pin the gauge.
struct Dual<'a, T: Scalar> {
    h: &'a dyn Hamiltonian<T>,
    j: &'a [T],
    pin: bool,
}

impl<T: Scalar> SmoothObjective<T> for Dual<'_, T> {
    fn dim(&self) -> usize {
        self.h.dim()
    }
    fn value(&self, x: &[T]) -> T {
        let mut v = self.h.eval(x) - crate::scalar::dot(self.j, x);
        if self.pin {
            let s: T = x.iter().copied().sum();
            v = v + T::lit(0.5) * s * s;
        }
        v
    }
    fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = self.h.grad(x);
        let s: T = if self.pin { x.iter().copied().sum() } else { T::zero() };
        for (gi, &ji) in g.iter_mut().zip(self.j) {
            *gi = *gi - ji + s;
        }
        g
    }
    fn hessian(&self, x: &[T]) -> Matrix<T> {
        let mut h = self.h.hessian(x);
        if self.pin {
            let n = h.rows();
            h = Matrix::from_fn(n, n, |i, k| h[(i, k)] + T::one());
        }
        h
    }
}

/// A few undamped Newton steps past the stopping tolerance, each kept only if
/// it shrinks the gradient. Values then come out accurate to round-off.
fn polish<T: Scalar>(obj: &Dual<'_, T>, mut x: Vec<T>) -> Vec<T> {
    let mut res = max_abs(&obj.gradient(&x));
    for _ in 0..4 {
        let g = obj.gradient(&x);
        let Ok(lu) = Lu::new(&obj.hessian(&x)) else {
            break;
        };
        let d = lu.solve(&g);
        let cand: Vec<T> = x.iter().zip(&d).map(|(&a, &b)| a - b).collect();
        let r = max_abs(&obj.gradient(&cand));
        if !(r < res) {
            break;
        }
        x = cand;
        res = r;
    }
    x
}

fn recentre<T: Scalar>(xi: &mut [T]) {
    if xi.is_empty() {
        return;
    }
    let mean = xi.iter().copied().sum::<T>() / T::count(xi.len());
    for v in xi.iter_mut() {
        *v = *v - mean;
    }
}

/// Legendre transform at `j`, Newton from `ξ = 0` with the default settings.
pub fn legendre<T: Scalar>(h: &dyn Hamiltonian<T>, j: &[T]) -> Result<LagrangianValue<T>> {
    legendre_with(h, j, None, &NewtonConfig::default())
}

/// Legendre transform with an explicit start and solver configuration.
///
/// For gauge-invariant `ℋ` the flux must satisfy `Σ j = 0`, otherwise the
/// supremum is infinite.
pub fn legendre_with<T: Scalar>(
    h: &dyn Hamiltonian<T>,
    j: &[T],
    start: Option<&[T]>,
    cfg: &NewtonConfig,
) -> Result<LagrangianValue<T>> {
    let n = h.dim();
    if j.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: j.len(),
        });
    }
    let pin = h.gauge() == Gauge::Constant;
    if pin {
        let sum: T = j.iter().copied().sum();
        if sum.abs() > T::tol(1e-10) * max_abs(j).max(T::one()) * T::count(n.max(1)) {
            return Err(Error::InvalidArgument(format!(
                "flux for a gauge-invariant Hamiltonian must sum to zero, got {sum}"
            )));
        }
    }
    let zero = vec![T::zero(); n];
    let x0 = start.unwrap_or(&zero);
    let obj = Dual { h, j, pin };
    let r = newton_minimize(&obj, x0, cfg)?;
    let mut xi = polish(&obj, r.x);
    if pin {
        recentre(&mut xi);
    }
    let g = h.grad(&xi);
    let residual = g
        .iter()
        .zip(j)
        .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    let value = crate::scalar::dot(j, &xi) - h.eval(&xi);
    Ok(LagrangianValue {
        value,
        xi,
        residual,
        iterations: r.iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinResult<T> {
    pub value: T,
    pub xi: Vec<T>,
    /// `‖∇ℋ(ξ*)‖∞`
    pub residual: T,
}

/// `min_ξ ℋ(ξ)`, found by minimising `ℋ` directly.
pub fn min_hamiltonian<T: Scalar>(h: &dyn Hamiltonian<T>) -> Result<MinResult<T>> {
    let zero = vec![T::zero(); h.dim()];
    let r = legendre(h, &zero)?;
    Ok(MinResult {
        value: -r.value,
        xi: r.xi,
        residual: r.residual,
    })
}

/// Settings for the random midpoint probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub samples: usize,
    /// Relative tolerance: violations are divided by `1 + |ℋ(u)| + |ℋ(v)|`.
    pub tol: f64,
    /// Sample points are uniform in `[−radius, radius]^dim` around the centre.
    pub radius: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            samples: 64,
            tol: 1e-9,
            radius: 2.0,
            seed: 0x5eed_c0de,
        }
    }
}

fn sample<T: Scalar>(rng: &mut Pcg64, centre: &[T], radius: f64) -> Vec<T> {
    centre
        .iter()
        .map(|&c| c + T::lit(rng.random_range(-radius..=radius)))
        .collect()
}

/// Largest relative midpoint-convexity violation over random pairs.
/// Non-positive means the probe found no violation.
pub fn convexity_violation<T: Scalar>(h: &dyn Hamiltonian<T>, cfg: &ProbeConfig) -> T {
    let mut rng = Pcg64::seed_from_u64(cfg.seed);
    let centre = vec![T::zero(); h.dim()];
    let half = T::lit(0.5);
    let mut worst = T::neg_infinity();
    for _ in 0..cfg.samples {
        let u = sample(&mut rng, &centre, cfg.radius);
        let v = sample(&mut rng, &centre, cfg.radius);
        let m: Vec<T> = u.iter().zip(&v).map(|(&a, &b)| half * (a + b)).collect();
        let (hu, hv) = (h.eval(&u), h.eval(&v));
        let gap = h.eval(&m) - half * (hu + hv);
        worst = worst.max(gap / (T::one() + hu.abs() + hv.abs()));
    }
    worst
}

/// Largest relative value of `|ℋ(½dS + η) − ℋ(½dS − η)|` over random `η`.
/// Zero for a Hamiltonian reversible with respect to `dS`.
pub fn reversibility_defect<T: Scalar>(h: &dyn Hamiltonian<T>, ds: &[T], cfg: &ProbeConfig) -> T {
    let mut rng = Pcg64::seed_from_u64(cfg.seed);
    let half = T::lit(0.5);
    let mid: Vec<T> = ds.iter().map(|&d| half * d).collect();
    let zero = vec![T::zero(); ds.len()];
    let mut worst = T::zero();
    for _ in 0..cfg.samples {
        let eta = sample(&mut rng, &zero, cfg.radius);
        let p: Vec<T> = mid.iter().zip(&eta).map(|(&m, &e)| m + e).collect();
        let q: Vec<T> = mid.iter().zip(&eta).map(|(&m, &e)| m - e).collect();
        let (hp, hq) = (h.eval(&p), h.eval(&q));
        worst = worst.max((hp - hq).abs() / (T::one() + hp.abs() + hq.abs()));
    }
    worst
}
