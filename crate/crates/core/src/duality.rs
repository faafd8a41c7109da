//! Time reversal at the generator level.
//!
//! The adjoint chain has rates `r*_xy = π(y) r_yx / π(x)`. In matrix form,
//! with the forward generator `W[(y, x)] = r_xy`,
//!
//! ```text
//! W* = diag(π) Wᵀ diag(π)⁻¹.
//! ```
//!
//! For any positive reference measure `μ` one may instead build
//! `W⁺_μ = diag(μ) Wᵀ diag(μ)⁻¹` and conjugate back with `h = μ/π`:
//! `W* = h⁻¹ W⁺_μ h`. On a finite state space every choice of `μ` gives the
//! same operator; the real freedom in choosing an iso-dissipation force lives
//! on the level set of `Ψ*` (see [`crate::force_flux::IsoSelector`]).

use crate::chain::{stationary, ChainSpec, Density, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::force_flux::{force_split, mobility_force, EdgeField};
use crate::scalar::Scalar;
use crate::solvers::Matrix;

fn adjoint_rates<T: Scalar>(spec: &ChainSpec<T>, pi: &Density<T>) -> Matrix<T> {
    let n = spec.n_states();
    Matrix::from_fn(n, n, |x, y| {
        if x == y {
            T::zero()
        } else {
            pi[y] * spec.rate(y, x) / pi[x]
        }
    })
}

/// The time-reversed chain with respect to the stationary measure.
pub fn adjoint_chain<T: Scalar>(spec: &ChainSpec<T>) -> Result<ChainSpec<T>> {
    let pi = stationary(spec)?;
    let adj = ChainSpec::from_rate_matrix(&adjoint_rates(spec, &pi))?;
    match spec.labels() {
        Some(l) => adj.with_labels(l.to_vec()),
        None => Ok(adj),
    }
}

/// The adjoint generator built through a reference measure `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointRepresentation<T> {
    pub mu: Density<T>,
    /// `h = μ / π`
    pub h: Vec<T>,
    /// `diag(μ) Wᵀ diag(μ)⁻¹`
    pub w_plus_mu: GeneratorMatrix<T>,
    /// `h⁻¹ W⁺_μ h`
    pub w_star: GeneratorMatrix<T>,
    /// Entrywise distance from `w_star` to the adjoint built from `π` directly.
    pub defect: T,
}

/// Build `W⁺_μ` and reconstruct `W*` from it.
///
/// Errors with [`Error::RepresentationMismatch`] if the reconstruction
/// disagrees with the `π`-adjoint by more than `1e-12` times the largest
/// generator entry (at least `1e-12` absolute).
pub fn representation<T: Scalar>(
    spec: &ChainSpec<T>,
    mu: &Density<T>,
) -> Result<AdjointRepresentation<T>> {
    let n = spec.n_states();
    mu.ensure_len(n)?;
    if let Some(x) = mu.first_zero() {
        return Err(Error::ZeroReference(x));
    }
    let pi = stationary(spec)?;
    let w = GeneratorMatrix::from_spec(spec);
    let wm = w.matrix();
    let w_plus = Matrix::from_fn(n, n, |x, y| wm[(y, x)] * mu[x] / mu[y]);
    let h: Vec<T> = (0..n).map(|x| mu[x] / pi[x]).collect();
    let w_star = Matrix::from_fn(n, n, |x, y| w_plus[(x, y)] * h[y] / h[x]);
    let direct = Matrix::from_fn(n, n, |x, y| wm[(y, x)] * pi[x] / pi[y]);
    let defect = w_star.max_abs_diff(&direct);
    if defect > T::tol(1e-12) * wm.max_abs().max(T::one()) {
        return Err(Error::RepresentationMismatch {
            defect: defect.to_f64_lossy(),
        });
    }
    Ok(AdjointRepresentation {
        mu: mu.clone(),
        h,
        w_plus_mu: GeneratorMatrix::from_matrix(w_plus),
        w_star: GeneratorMatrix::from_matrix(w_star),
        defect,
    })
}

/// Force of the adjoint chain at `rho`.
pub fn dual_force<T: Scalar>(spec: &ChainSpec<T>, rho: &Density<T>) -> Result<EdgeField<T>> {
    let adj = adjoint_chain(spec)?;
    Ok(mobility_force(&adj, rho)?.1)
}

/// `(F_S, F_A) = ((F + F*)/2, (F − F*)/2)`.
pub fn canonical_split<T: Scalar>(
    spec: &ChainSpec<T>,
    rho: &Density<T>,
) -> Result<(EdgeField<T>, EdgeField<T>)> {
    let (_, force) = mobility_force(spec, rho)?;
    let dual = dual_force(spec, rho)?;
    let dual = EdgeField::new(force.edges().clone(), dual.into_values())?;
    force_split(&force, &dual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::force_flux::{entropy_production, flux, psi_star};

    fn r3() -> ChainSpec<f64> {
        ChainSpec::new(
            3,
            [(0, 1, 2.0), (1, 2, 2.0), (2, 0, 2.0), (1, 0, 1.0), (2, 1, 1.0), (0, 2, 1.0)],
        )
        .unwrap()
    }

    // Metropolis chain for weights (1, 2, 3) on a triangle
    fn reversible() -> ChainSpec<f64> {
        let w = [1.0, 2.0, 3.0];
        let mut t = vec![];
        for x in 0..3 {
            for y in 0..3 {
                if x != y {
                    t.push((x, y, f64::min(1.0, w[y] / w[x])));
                }
            }
        }
        ChainSpec::new(3, t).unwrap()
    }

    fn four_state() -> ChainSpec<f64> {
        ChainSpec::new(
            4,
            [
                (0, 1, 1.3),
                (1, 0, 0.4),
                (1, 2, 2.2),
                (2, 1, 0.7),
                (2, 3, 0.9),
                (3, 2, 1.8),
                (3, 0, 1.1),
                (0, 3, 0.3),
                (0, 2, 0.5),
                (2, 0, 1.6),
            ],
        )
        .unwrap()
    }

    #[test]
    fn ring_reverses_orientation() {
        let adj = adjoint_chain(&r3()).unwrap();
        for (x, y) in [(0, 1), (1, 2), (2, 0)] {
            assert!((adj.rate(x, y) - 1.0).abs() < 1e-12);
            assert!((adj.rate(y, x) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reversible_chain_is_self_adjoint() {
        let spec = reversible();
        let adj = adjoint_chain(&spec).unwrap();
        assert!(adj.generator().matrix().max_abs_diff(spec.generator().matrix()) < 1e-12);
    }

    #[test]
    fn involution_and_same_stationary_measure() {
        let spec = four_state();
        let adj = adjoint_chain(&spec).unwrap();
        let back = adjoint_chain(&adj).unwrap();
        assert!(back.generator().matrix().max_abs_diff(spec.generator().matrix()) < 1e-12);
        let (p, q) = (stationary(&spec).unwrap(), stationary(&adj).unwrap());
        for x in 0..4 {
            assert!((p[x] - q[x]).abs() < 1e-12);
        }
    }

    #[test]
    fn representations_agree() {
        let spec = r3();
        let pi = stationary(&spec).unwrap();
        let at_pi = representation(&spec, &pi).unwrap();
        assert!(at_pi.h.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(at_pi.w_plus_mu.matrix().max_abs_diff(at_pi.w_star.matrix()) < 1e-12);

        let spec = four_state();
        let mu = Density::normalized(vec![0.1, 0.7, 0.15, 0.05]).unwrap();
        let a = representation(&spec, &mu).unwrap();
        let b = representation(&spec, &Density::uniform(4)).unwrap();
        assert!(a.w_star.matrix().max_abs_diff(b.w_star.matrix()) < 1e-12);
        assert!(a.w_plus_mu.matrix().max_abs_diff(b.w_plus_mu.matrix()) > 1e-3);
        let adj = adjoint_chain(&spec).unwrap();
        assert!(a.w_star.matrix().max_abs_diff(adj.generator().matrix()) < 1e-12);
    }

    #[test]
    fn zero_reference_is_rejected() {
        let mu = Density::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(representation(&r3(), &mu).unwrap_err(), Error::ZeroReference(1));
    }

    #[test]
    fn dual_force_on_ring_flips_sign() {
        let spec = r3();
        let pi = stationary(&spec).unwrap();
        let (mob, f) = mobility_force(&spec, &pi).unwrap();
        let fs = dual_force(&spec, &pi).unwrap();
        for (u, v) in f.values().iter().zip(fs.values()) {
            assert!((u + v).abs() < 1e-12);
        }
        let fs = EdgeField::new(f.edges().clone(), fs.into_values()).unwrap();
        assert!((psi_star(&mob, &f).unwrap() - psi_star(&mob, &fs).unwrap()).abs() < 1e-12);
        let (s, a) = canonical_split(&spec, &pi).unwrap();
        assert!(s.max_abs() < 1e-12);
        assert!(a.zip_with(&f, |p, q| p - q).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn dissipation_equality_off_stationarity() {
        let spec = four_state();
        let rho = Density::normalized(vec![0.4, 0.1, 0.3, 0.2]).unwrap();
        let (mob, f) = mobility_force(&spec, &rho).unwrap();
        let (mob_adj, _) = mobility_force(&adjoint_chain(&spec).unwrap(), &rho).unwrap();
        for (u, v) in mob.values().iter().zip(mob_adj.values()) {
            assert!((u - v).abs() < 1e-12);
        }
        let fs = dual_force(&spec, &rho).unwrap();
        let fs = EdgeField::new(f.edges().clone(), fs.into_values()).unwrap();
        assert!((psi_star(&mob, &f).unwrap() - psi_star(&mob, &fs).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn canonical_split_of_reversible_chain() {
        let spec = reversible();
        let pi = stationary(&spec).unwrap();
        let (_, a) = canonical_split(&spec, &pi).unwrap();
        assert!(a.max_abs() < 1e-12);
        let rho = Density::new(vec![0.5, 0.3, 0.2]).unwrap();
        let (s, a) = canonical_split(&spec, &rho).unwrap();
        let (_, f) = mobility_force(&spec, &rho).unwrap();
        let sum = s.zip_with(&a, |p, q| p + q).unwrap();
        assert!(sum.zip_with(&f, |p, q| p - q).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn entropy_production_is_time_symmetric_at_stationarity() {
        let spec = four_state();
        let pi = stationary(&spec).unwrap();
        let adj = adjoint_chain(&spec).unwrap();
        let (m, f) = mobility_force(&spec, &pi).unwrap();
        let (ms, fs) = mobility_force(&adj, &pi).unwrap();
        let j = flux(&m, &f).unwrap();
        let js = flux(&ms, &fs).unwrap();
        for (u, v) in j.values().iter().zip(js.values()) {
            assert!((u + v).abs() < 1e-12);
        }
        let e = entropy_production(&j, &f).unwrap();
        let es = entropy_production(&js, &fs).unwrap();
        assert!(e > 0.0 && (e - es).abs() < 1e-10);
    }
}
