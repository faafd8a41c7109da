//! Splitting a Hamiltonian into two convex parts and the matching split of
//! the Lagrangian.
//!
//! If `ℋ = ℋ1 + ℋ2` with both parts convex and vanishing at zero, and `ξ'`
//! solves `∇ℋ(ξ') = j`, then with `s_k = ∇ℋ_k(ξ')`
//!
//! ```text
//! 𝓛(j) = 𝓛1(s1) + 𝓛2(s2),    s1 + s2 = j,
//! ```
//!
//! and both terms are non-negative.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::hamiltonian::{
    ConstantHamiltonian, DynHamiltonian, Hamiltonian, LinearHamiltonian, PsiStarFromHamiltonian,
    SumHamiltonian,
};
use super::legendre::{convexity_violation, legendre, reversibility_defect, ProbeConfig};
use crate::chain::{ChainSpec, Density};
use crate::error::{Error, Result};
use crate::force_flux::{mobility_force, pairing, psi, psi_star, EdgeField};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPart<T> {
    /// `𝓛_k(s_k)`
    pub value: T,
    /// `s_k = ∇ℋ_k(ξ')`
    pub flux_argument: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport<T> {
    /// `𝓛(j)` of the full Hamiltonian
    pub lagrangian: T,
    pub parts: Vec<SplitPart<T>>,
    pub xi_prime: Vec<T>,
    /// `‖∇ℋ(ξ') − j‖∞`
    pub residual: T,
    /// `|𝓛 − Σ 𝓛_k|`
    pub sum_defect: T,
    /// Filled in when the Hamiltonian is the edge form of a chain; see
    /// [`pairing_coefficient`].
    pub measured_pairing_coefficient: Option<T>,
}

fn probe_part<T: Scalar>(h: &dyn Hamiltonian<T>, part: usize, probe: &ProbeConfig) -> Result<()> {
    let v = convexity_violation(h, probe);
    if v > T::tol(probe.tol) {
        return Err(Error::NonConvexPart {
            part,
            violation: v.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Split `𝓛(j)` along `ℋ = ℋ1 + ℋ2`. Both parts are probed for convexity.
pub fn decompose<T: Scalar>(
    h1: DynHamiltonian<T>,
    h2: DynHamiltonian<T>,
    j: &[T],
    probe: &ProbeConfig,
) -> Result<SplitReport<T>> {
    probe_part(h1.as_ref(), 1, probe)?;
    probe_part(h2.as_ref(), 2, probe)?;
    let sum = SumHamiltonian::pair(Arc::clone(&h1), Arc::clone(&h2))?;
    let full = legendre(&sum, j)?;
    let mut parts = Vec::with_capacity(2);
    for h in [&h1, &h2] {
        let s = h.grad(&full.xi);
        let l = legendre(h.as_ref(), &s)?;
        parts.push(SplitPart {
            value: l.value,
            flux_argument: s,
        });
    }
    let sum_defect = (full.value - parts.iter().map(|p| p.value).sum::<T>()).abs();
    Ok(SplitReport {
        lagrangian: full.value,
        parts,
        xi_prime: full.xi,
        residual: full.residual,
        sum_defect,
        measured_pairing_coefficient: None,
    })
}

/// `c` in `𝓛(j) = ½[Ψ(j) − c⟨j, F⟩ + Ψ*(F)]`, solved from a computed `𝓛`.
/// `None` when `|⟨j, F⟩|` is too small for the ratio to mean anything.
pub fn pairing_coefficient<T: Scalar>(
    spec: &ChainSpec<T>,
    rho: &Density<T>,
    j: &EdgeField<T>,
    lagrangian: T,
) -> Result<Option<T>> {
    let (mob, f) = mobility_force(spec, rho)?;
    let jf = pairing(j, &f)?;
    if jf.abs() < T::tol(1e-6) {
        return Ok(None);
    }
    let num = psi(&mob, j)? + psi_star(&mob, &f)? - T::lit(2.0) * lagrangian;
    Ok(Some(num / jf))
}

/// Lagrangian of the edge form of a chain, with closed-form comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeLagrangian<T> {
    pub value: T,
    pub xi: Vec<T>,
    pub residual: T,
    /// `½[Ψ(j) − ⟨j, F⟩ + Ψ*(F)]`
    pub closed_form: T,
    /// `½[Ψ(j) − 2⟨j, F⟩ + Ψ*(F)]`, kept for comparison
    pub doubled_pairing_form: T,
    pub measured_pairing_coefficient: Option<T>,
}

pub fn edge_lagrangian<T: Scalar>(
    spec: &ChainSpec<T>,
    rho: &Density<T>,
    j: &EdgeField<T>,
) -> Result<EdgeLagrangian<T>> {
    let h = super::hamiltonian::hamiltonian_from_psi(spec, rho)?;
    let (mob, f) = mobility_force(spec, rho)?;
    let l = legendre(&h, j.values())?;
    let (p, ps, jf) = (psi(&mob, j)?, psi_star(&mob, &f)?, pairing(j, &f)?);
    let half = T::lit(0.5);
    Ok(EdgeLagrangian {
        value: l.value,
        closed_form: half * (p - jf + ps),
        doubled_pairing_form: half * (p - T::lit(2.0) * jf + ps),
        measured_pairing_coefficient: pairing_coefficient(spec, rho, j, l.value)?,
        xi: l.xi,
        residual: l.residual,
    })
}

/// `Ψ2*(ξ) = 2[ℋ2(½(ξ + dS)) − ℋ2(½dS)]` as a Hamiltonian handle.
pub fn psi2_star<T: Scalar>(h2: DynHamiltonian<T>, ds: &[T]) -> Result<PsiStarFromHamiltonian<T>> {
    let minus_ds: Vec<T> = ds.iter().map(|&d| -d).collect();
    PsiStarFromHamiltonian::new(h2, &minus_ds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReversibleValue<T> {
    /// `½Ψ2*(dS)`
    pub value: T,
    /// `𝓛2(0)` by Newton
    pub lagrangian: T,
    pub defect: T,
    pub reversibility_defect: T,
}

fn ensure_reversible<T: Scalar>(h2: &dyn Hamiltonian<T>, ds: &[T], probe: &ProbeConfig) -> Result<T> {
    if ds.len() != h2.dim() {
        return Err(Error::DimensionMismatch {
            expected: h2.dim(),
            got: ds.len(),
        });
    }
    let d = reversibility_defect(h2, ds, probe);
    if d > T::tol(probe.tol) {
        return Err(Error::NotReversible {
            defect: d.to_f64_lossy(),
        });
    }
    Ok(d)
}

/// Zero-flux Lagrangian of a Hamiltonian reversible with respect to `dS`.
pub fn reversible_value<T: Scalar>(
    h2: DynHamiltonian<T>,
    ds: &[T],
    probe: &ProbeConfig,
) -> Result<ReversibleValue<T>> {
    let rev = ensure_reversible(h2.as_ref(), ds, probe)?;
    let zero = vec![T::zero(); h2.dim()];
    let lag = legendre(h2.as_ref(), &zero)?.value;
    let value = T::lit(0.5) * psi2_star(h2, ds)?.eval(ds);
    Ok(ReversibleValue {
        value,
        lagrangian: lag,
        defect: (value - lag).abs(),
        reversibility_defect: rev,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantPartValue<T> {
    /// `𝓛1(0) − c`
    pub value: T,
    /// Newton on `ℋ1 + c`
    pub direct: T,
    pub defect: T,
}

/// `ℋ = ℋ1 + c` with `c` independent of `ξ`.
pub fn constant_part_value<T: Scalar>(h1: DynHamiltonian<T>, c: T) -> Result<ConstantPartValue<T>> {
    let n = h1.dim();
    let zero = vec![T::zero(); n];
    let l1 = legendre(h1.as_ref(), &zero)?.value;
    let konst: DynHamiltonian<T> = Arc::new(ConstantHamiltonian { dim: n, value: c });
    let sum = SumHamiltonian::pair(h1, konst)?;
    let direct = legendre(&sum, &zero)?.value;
    let value = l1 - c;
    Ok(ConstantPartValue {
        value,
        direct,
        defect: (value - direct).abs(),
    })
}

/// Report for `ℋ = ⟨𝒲, ξ⟩ + ℋ2` with `ℋ2` reversible about `dS`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPartReport<T> {
    pub split: SplitReport<T>,
    /// `𝓛(0)` of the full Hamiltonian
    pub lagrangian: T,
    /// `𝓛2(−𝒲)`
    pub l2_at_minus_w: T,
    pub defect: T,
    pub psi2_minus_w: T,
    pub psi2_star_ds: T,
    pub w_dot_ds: T,
    /// `½[Ψ2(−𝒲) − ⟨𝒲, dS⟩ + Ψ2*(dS)]`; equals `𝓛(0)`.
    pub expansion: T,
    pub expansion_defect: T,
    /// The same expansion with `+⟨𝒲, dS⟩`.
    pub plus_pairing_expansion: T,
    pub plus_pairing_defect: T,
    /// `Ψ2(−𝒲) + Ψ2*(−½dS)`
    pub alternative_form: T,
    pub alternative_defect: T,
    /// `½Ψ2(−𝒲) + ½Ψ2*(dS)` and its defect, when `⟨𝒲, dS⟩ ≈ 0`.
    pub orthogonal_form: Option<T>,
    pub orthogonal_defect: Option<T>,
}

pub fn linear_part_value<T: Scalar>(
    w: &[T],
    h2: DynHamiltonian<T>,
    ds: &[T],
    probe: &ProbeConfig,
) -> Result<LinearPartReport<T>> {
    ensure_reversible(h2.as_ref(), ds, probe)?;
    let n = h2.dim();
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: w.len(),
        });
    }
    let lin: DynHamiltonian<T> = Arc::new(match h2.gauge() {
        super::hamiltonian::Gauge::Constant => LinearHamiltonian::state_level(w.to_vec())?,
        super::hamiltonian::Gauge::None => LinearHamiltonian::new(w.to_vec()),
    });
    let zero = vec![T::zero(); n];
    let split = decompose(lin, Arc::clone(&h2), &zero, probe)?;
    let minus_w: Vec<T> = w.iter().map(|&v| -v).collect();
    let l2 = legendre(h2.as_ref(), &minus_w)?.value;

    let ps = psi2_star(Arc::clone(&h2), ds)?;
    let psi2_minus_w = legendre(&ps, &minus_w)?.value;
    let psi2_star_ds = ps.eval(ds);
    let half_ds: Vec<T> = ds.iter().map(|&d| -T::lit(0.5) * d).collect();
    let psi2_star_half = ps.eval(&half_ds);
    let w_dot_ds = dot(w, ds);

    let half = T::lit(0.5);
    let lag = split.lagrangian;
    let expansion = half * (psi2_minus_w - w_dot_ds + psi2_star_ds);
    let plus = half * (psi2_minus_w + w_dot_ds + psi2_star_ds);
    let alt = psi2_minus_w + psi2_star_half;
    let scale = w.iter().chain(ds).fold(T::one(), |m, v| m.max(v.abs()));
    let (orth, orth_defect) = if w_dot_ds.abs() <= T::tol(1e-10) * scale * scale {
        let o = half * (psi2_minus_w + psi2_star_ds);
        (Some(o), Some((o - lag).abs()))
    } else {
        (None, None)
    };
    Ok(LinearPartReport {
        lagrangian: lag,
        l2_at_minus_w: l2,
        defect: (lag - l2).abs(),
        psi2_minus_w,
        psi2_star_ds,
        w_dot_ds,
        expansion,
        expansion_defect: (expansion - lag).abs(),
        plus_pairing_expansion: plus,
        plus_pairing_defect: (plus - lag).abs(),
        alternative_form: alt,
        alternative_defect: (alt - lag).abs(),
        orthogonal_form: orth,
        orthogonal_defect: orth_defect,
        split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::stationary;
    use crate::variational::hamiltonian::{hamiltonian_from_psi, EdgeHamiltonian, FnHamiltonian, Gauge};
    use crate::solvers::Matrix;

    fn r3() -> ChainSpec<f64> {
        ChainSpec::new(
            3,
            [(0, 1, 2.0), (1, 2, 2.0), (2, 0, 2.0), (1, 0, 1.0), (2, 1, 1.0), (0, 2, 1.0)],
        )
        .unwrap()
    }

    fn rho3() -> Density<f64> {
        Density::new(vec![0.2, 0.5, 0.3]).unwrap()
    }

    fn metropolis() -> ChainSpec<f64> {
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

    #[test]
    fn edge_partition_split() {
        let h = hamiltonian_from_psi(&r3(), &rho3()).unwrap();
        let h1: DynHamiltonian<f64> = Arc::new(h.restricted(&[2]).unwrap());
        let h2: DynHamiltonian<f64> = Arc::new(h.restricted(&[0, 1]).unwrap());
        let j = [0.1, -0.25, 0.3];
        let r = decompose(h1, h2, &j, &ProbeConfig::default()).unwrap();
        assert!(r.sum_defect < 1e-10, "{}", r.sum_defect);
        assert!(r.parts.iter().all(|p| p.value >= -1e-12));
        let direct = legendre(&h, &j).unwrap().value;
        assert!((r.lagrangian - direct).abs() < 1e-12);
    }

    #[test]
    fn degenerate_split() {
        let h: DynHamiltonian<f64> = Arc::new(hamiltonian_from_psi(&r3(), &rho3()).unwrap());
        let zero: DynHamiltonian<f64> = Arc::new(ConstantHamiltonian { dim: 3, value: 0.0 });
        let j = [0.2, 0.1, -0.1];
        let r = decompose(zero, Arc::clone(&h), &j, &ProbeConfig::default()).unwrap();
        assert!(r.parts[0].value.abs() < 1e-15);
        assert!((r.parts[1].value - r.lagrangian).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn linear_plus_remainder_split() {
        let h = hamiltonian_from_psi(&r3(), &rho3()).unwrap();
        let w = h.grad(&[0.0; 3]);
        let lin: DynHamiltonian<f64> = Arc::new(LinearHamiltonian::new(w.clone()));
        let neg: DynHamiltonian<f64> = Arc::new(LinearHamiltonian::new(w.iter().map(|v| -v).collect()));
        let rest: DynHamiltonian<f64> =
            Arc::new(SumHamiltonian::pair(Arc::new(h.clone()), neg).unwrap());
        let r = decompose(rest, lin, &[0.0; 3], &ProbeConfig::default()).unwrap();
        assert!(r.sum_defect < 1e-10);
        assert!(r.parts.iter().all(|p| p.value >= -1e-12));
    }

    #[test]
    fn nonconvex_part_is_rejected() {
        let bad: DynHamiltonian<f64> = Arc::new(FnHamiltonian {
            dim: 3,
            gauge: Gauge::None,
            eval: |x: &[f64]| -x[0] * x[0],
            grad: |x: &[f64]| vec![-2.0 * x[0], 0.0, 0.0],
            hessian: |_: &[f64]| Matrix::from_fn(3, 3, |i, j| if i == 0 && j == 0 { -2.0 } else { 0.0 }),
        });
        let h: DynHamiltonian<f64> = Arc::new(hamiltonian_from_psi(&r3(), &rho3()).unwrap());
        let e = decompose(h, bad, &[0.0; 3], &ProbeConfig::default()).unwrap_err();
        assert!(matches!(e, Error::NonConvexPart { part: 2, .. }));
    }

    #[test]
    fn pairing_coefficient_is_one() {
        let spec = r3();
        let rho = rho3();
        let (_, f) = mobility_force(&spec, &rho).unwrap();
        let j = EdgeField::new(f.edges().clone(), vec![0.4, 0.1, -0.3]).unwrap();
        let r = edge_lagrangian(&spec, &rho, &j).unwrap();
        let c = r.measured_pairing_coefficient.unwrap();
        assert!((c - 1.0).abs() < 1e-9, "{c}");
        assert!((r.value - r.closed_form).abs() < 1e-12);
    }

    fn reversible_edge(spec: &ChainSpec<f64>, rho: &Density<f64>) -> (DynHamiltonian<f64>, Vec<f64>) {
        let (mob, f) = mobility_force(spec, rho).unwrap();
        let h = EdgeHamiltonian::new(mob.values(), &f).unwrap();
        let ds = f.values().iter().map(|v| -v).collect();
        (Arc::new(h), ds)
    }

    #[test]
    fn reversible_value_routes_agree() {
        let spec = metropolis();
        let rho = Density::new(vec![0.6, 0.1, 0.3]).unwrap();
        let (h, ds) = reversible_edge(&spec, &rho);
        let r = reversible_value(h, &ds, &ProbeConfig::default()).unwrap();
        assert!(r.value > 0.0 && r.defect < 1e-10, "{r:?}");

        let pi = stationary(&spec).unwrap();
        let (h, ds) = reversible_edge(&spec, &pi);
        let r = reversible_value(h, &ds, &ProbeConfig::default()).unwrap();
        assert!(r.value.abs() < 1e-14);
    }

    #[test]
    fn irreversible_input_is_rejected() {
        let (h, ds) = reversible_edge(&r3(), &rho3());
        let wrong: Vec<f64> = ds.iter().map(|v| v + 0.5).collect();
        assert!(matches!(
            reversible_value(h, &wrong, &ProbeConfig::default()),
            Err(Error::NotReversible { .. })
        ));
    }

    #[test]
    fn constant_shift() {
        let h: DynHamiltonian<f64> = Arc::new(hamiltonian_from_psi(&r3(), &rho3()).unwrap());
        let r = constant_part_value(Arc::clone(&h), 0.0).unwrap();
        assert_eq!(r.defect, 0.0);
        let r = constant_part_value(h, 0.37).unwrap();
        assert!(r.defect < 1e-14);
    }

    #[test]
    fn linear_part_identities() {
        let (h2, ds) = reversible_edge(&metropolis(), &Density::new(vec![0.6, 0.1, 0.3]).unwrap());
        let w = [0.05, -0.1, 0.07];
        let r = linear_part_value(&w, Arc::clone(&h2), &ds, &ProbeConfig::default()).unwrap();
        assert!(r.defect < 1e-10, "{}", r.defect);
        assert!(r.expansion_defect < 1e-9, "{}", r.expansion_defect);
        assert!(r.plus_pairing_defect > 1e-4);

        let r = linear_part_value(&[0.0; 3], h2.clone(), &ds, &ProbeConfig::default()).unwrap();
        let rv = reversible_value(h2, &ds, &ProbeConfig::default()).unwrap();
        assert!((r.lagrangian - rv.value).abs() < 1e-10);
        assert!(r.orthogonal_defect.unwrap() < 1e-10);
    }
}
