//! Donsker–Varadhan rate function of the empirical occupation measure,
//!
//! ```text
//! I(ρ) = sup_ξ −ℋ_state(ρ, ξ) = sup_{u>0} −Σ_x ρ(x) (Lu)(x) / u(x),
//! ```
//!
//! computed by Newton in `ξ` and, independently, by exact coordinate descent
//! in `u`.

use serde::{Deserialize, Serialize};

use super::hamiltonian::{hamiltonian_from_generator, Hamiltonian};
use super::legendre::legendre;
use crate::chain::{ChainSpec, Density};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DvReport<T> {
    pub value: T,
    pub xi: Vec<T>,
    pub residual: T,
    /// Value from the `u` route
    pub u_form: T,
    pub defect: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UFormValue<T> {
    pub value: T,
    /// Optimal `u`, normalised to `max u = 1`
    pub u: Vec<T>,
    pub sweeps: usize,
}

fn positive<T: Scalar>(spec: &ChainSpec<T>, rho: &Density<T>) -> Result<()> {
    rho.ensure_len(spec.n_states())?;
    match rho.first_zero() {
        Some(x) => Err(Error::ZeroDensity(x)),
        None => Ok(()),
    }
}

/// `I(ρ)` by Newton on the state-level Hamiltonian, cross-checked by the `u` route.
pub fn donsker_varadhan<T: Scalar>(spec: &ChainSpec<T>, rho: &Density<T>) -> Result<DvReport<T>> {
    positive(spec, rho)?;
    let h = hamiltonian_from_generator(spec, rho)?;
    let zero = vec![T::zero(); h.dim()];
    let l = legendre(&h, &zero)?;
    let u = dv_u_form(spec, rho)?;
    Ok(DvReport {
        defect: (l.value - u.value).abs(),
        value: l.value,
        xi: l.xi,
        residual: l.residual,
        u_form: u.value,
    })
}

/// `I(ρ)` by coordinate descent on `J(u) = Σ_x ρ(x) Σ_y r_xy (u_y/u_x − 1)`.
///
/// Holding the other coordinates fixed, `J` is `B u_z + A / u_z` plus a
/// constant, minimised at `u_z = √(A/B)`.
pub fn dv_u_form<T: Scalar>(spec: &ChainSpec<T>, rho: &Density<T>) -> Result<UFormValue<T>> {
    positive(spec, rho)?;
    let n = spec.n_states();
    let mut u = vec![T::one(); n];
    let objective = |u: &[T]| -> T {
        let mut s = T::zero();
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    s = s + rho[x] * spec.rate(x, y) * (u[y] / u[x] - T::one());
                }
            }
        }
        s
    };
    let step_tol = T::tol(1e-14);
    let max_sweeps = 200_000;
    for sweep in 1..=max_sweeps {
        let mut biggest = T::zero();
        for z in 0..n {
            let a: T = (0..n)
                .filter(|&y| y != z)
                .map(|y| spec.rate(z, y) * u[y])
                .sum::<T>()
                * rho[z];
            let b: T = (0..n)
                .filter(|&x| x != z)
                .map(|x| rho[x] * spec.rate(x, z) / u[x])
                .sum();
            if !(a > T::zero() && b > T::zero()) {
                return Err(Error::InvalidArgument(format!("state {z} has no in- or out-rates")));
            }
            let new = (a / b).sqrt();
            biggest = biggest.max((new / u[z]).ln().abs());
            u[z] = new;
        }
        let top = u.iter().fold(T::zero(), |m, &v| m.max(v));
        for v in u.iter_mut() {
            *v = *v / top;
        }
        if biggest <= step_tol {
            return Ok(UFormValue {
                value: -objective(&u),
                u,
                sweeps: sweep,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_sweeps,
        residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::stationary;
    use crate::solvers::golden_section;

    fn c2() -> ChainSpec<f64> {
        ChainSpec::new(2, [(0, 1, 2.0), (1, 0, 1.0)]).unwrap()
    }

    #[test]
    fn vanishes_at_stationarity() {
        let spec = c2();
        let pi = stationary(&spec).unwrap();
        let r = donsker_varadhan(&spec, &pi).unwrap();
        assert!(r.value.abs() < 1e-12 && r.u_form.abs() < 1e-12);
    }

    #[test]
    fn two_state_against_one_dimensional_search() {
        let spec = c2();
        let rho = Density::uniform(2);
        let r = donsker_varadhan(&spec, &rho).unwrap();
        // with t = u1/u0: J(t) = ρ0 r01 (t − 1) + ρ1 r10 (1/t − 1)
        let j = |s: f64| {
            let t = s.exp();
            0.5 * 2.0 * (t - 1.0) + 0.5 * 1.0 * (1.0 / t - 1.0)
        };
        let (_, jmin) = golden_section(j, -10.0, 10.0, 1e-12);
        assert!((r.value + jmin).abs() < 1e-10);
        // closed form for two states: (√(ρ0 r01) − √(ρ1 r10))²
        let exact = (1f64.sqrt() - 0.5f64.sqrt()).powi(2);
        assert!((r.value - exact).abs() < 1e-12);
        assert!(r.defect < 1e-10);
        assert!(r.value > 0.0);
    }

    #[test]
    fn ring_routes_agree() {
        let spec = ChainSpec::new(
            3,
            [(0, 1, 2.0), (1, 2, 2.0), (2, 0, 2.0), (1, 0, 1.0), (2, 1, 1.0), (0, 2, 1.0)],
        )
        .unwrap();
        let rho = Density::new(vec![0.2, 0.5, 0.3]).unwrap();
        let r = donsker_varadhan(&spec, &rho).unwrap();
        assert!(r.value > 0.0 && r.defect < 1e-10, "{r:?}");
    }

    #[test]
    fn zero_density_rejected() {
        let rho = Density::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(donsker_varadhan(&c2(), &rho).unwrap_err(), Error::ZeroDensity(1));
    }
}
