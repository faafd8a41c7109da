//! Periodic 1-D drift–diffusion on a finite-volume grid.
//!
//! The unit circle is cut into `n` cells of width `h = 1/n`. Face `i` joins
//! cell `i` to cell `i + 1 (mod n)` and carries a drift `b_i` and a diffusion
//! `D_i > 0`. Cell masses evolve by the nearest-neighbour chain
//!
//! ```text
//! i → i+1:  D/h² + b/(2h)        i+1 → i:  D/h² − b/(2h)
//! ```
//!
//! which is the central discretisation of `∂ρ = −∂(bρ) + ∂(D∂ρ)`. When
//! `|b| h / (2D) ≥ 1` a face falls back to upwinding, `D/h² + max(±b, 0)/h`,
//! and the result is flagged as first-order accurate.
//!
//! Per-face quantities are reported in drift units: a chain force `F` on face
//! `i` corresponds to `(D_i/h) F`. The drift the chain actually realises is
//! `f_i = (D_i/h) log(r_fwd/r_bwd)`, equal to `b_i` up to `O(h²)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{stationary, ChainSpec, Density};
use crate::duality::adjoint_chain;
use crate::error::{Error, Result};
use crate::scalar::{dot, max_abs, max_abs_diff, Scalar};
use crate::solvers::Matrix;
use crate::variational::{
    hamiltonian_from_generator, legendre, psi2_star, DynHamiltonian, Hamiltonian,
    LinearHamiltonian, SumHamiltonian,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridModel<T> {
    pub n_cells: usize,
    pub drift: Vec<T>,
    pub diffusion: Vec<T>,
}

impl<T: Scalar> GridModel<T> {
    pub fn new(n_cells: usize, drift: Vec<T>, diffusion: Vec<T>) -> Result<Self> {
        let m = Self {
            n_cells,
            drift,
            diffusion,
        };
        m.check()?;
        Ok(m)
    }

    pub fn check(&self) -> Result<()> {
        if self.n_cells < 3 {
            return Err(Error::InvalidArgument("grid needs at least 3 cells".into()));
        }
        for v in [&self.drift, &self.diffusion] {
            if v.len() != self.n_cells {
                return Err(Error::DimensionMismatch {
                    expected: self.n_cells,
                    got: v.len(),
                });
            }
        }
        if self.drift.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("drift must be finite".into()));
        }
        if self.diffusion.iter().any(|d| !(*d > T::zero()) || !d.is_finite()) {
            return Err(Error::InvalidArgument("diffusion must be positive".into()));
        }
        Ok(())
    }

    pub fn constant(n_cells: usize, drift: T, diffusion: T) -> Result<Self> {
        Self::new(n_cells, vec![drift; n_cells], vec![diffusion; n_cells])
    }

    /// `b = −D ∇_h U` from a cell potential; reversible only up to `O(h²)`.
    pub fn gradient_drift(potential: &[T], diffusion: T) -> Result<Self> {
        let n = potential.len();
        let h = T::one() / T::count(n.max(1));
        let drift = (0..n)
            .map(|i| -diffusion * (potential[(i + 1) % n] - potential[i]) / h)
            .collect();
        Self::new(n, drift, vec![diffusion; n])
    }

    /// Drift `b = (2D/h) tanh(−ΔU/2)`, chosen so that the discrete chain is in
    /// exact detailed balance with weights `e^{−U}`.
    pub fn reversible(potential: &[T], diffusion: T) -> Result<Self> {
        let n = potential.len();
        let h = T::one() / T::count(n.max(1));
        let two = T::lit(2.0);
        let drift = (0..n)
            .map(|i| {
                let du = potential[(i + 1) % n] - potential[i];
                two * diffusion / h * (-du / two).tanh()
            })
            .collect();
        Self::new(n, drift, vec![diffusion; n])
    }

    pub fn h(&self) -> T {
        T::one() / T::count(self.n_cells)
    }

    /// Cell centres `(i + ½) h`.
    pub fn centres(&self) -> Vec<T> {
        let h = self.h();
        (0..self.n_cells)
            .map(|i| (T::count(i) + T::lit(0.5)) * h)
            .collect()
    }

    /// Masses proportional to `f` at cell centres.
    pub fn density_from_fn(&self, f: impl Fn(T) -> T) -> Result<Density<T>> {
        Density::normalized(self.centres().into_iter().map(f).collect())
    }

    fn face_rates(&self, i: usize) -> (T, T, bool) {
        let h = self.h();
        let (b, d) = (self.drift[i], self.diffusion[i]);
        let diff = d / (h * h);
        if (b * h / (T::lit(2.0) * d)).abs() >= T::one() {
            (
                diff + b.max(T::zero()) / h,
                diff + (-b).max(T::zero()) / h,
                true,
            )
        } else {
            let adv = b / (T::lit(2.0) * h);
            (diff + adv, diff - adv, false)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discretization<T> {
    pub spec: ChainSpec<T>,
    /// Faces where upwinding replaced the central scheme.
    pub upwind_faces: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Nearest-neighbour jump chain for a grid model.
pub fn discretize<T: Scalar>(model: &GridModel<T>) -> Result<Discretization<T>> {
    model.check()?;
    let n = model.n_cells;
    let mut triples = Vec::with_capacity(2 * n);
    let mut upwind_faces = Vec::new();
    for i in 0..n {
        let (f, b, up) = model.face_rates(i);
        triples.push((i, (i + 1) % n, f));
        triples.push(((i + 1) % n, i, b));
        if up {
            upwind_faces.push(i);
        }
    }
    let warnings = if upwind_faces.is_empty() {
        vec![]
    } else {
        vec![format!(
            "upwinding on {} of {n} faces: first-order accurate there",
            upwind_faces.len()
        )]
    };
    Ok(Discretization {
        spec: ChainSpec::new(n, triples)?,
        upwind_faces,
        warnings,
    })
}

fn face_diff<T: Scalar>(v: &[T], i: usize) -> T {
    v[(i + 1) % v.len()] - v[i]
}

/// Drift realised by the chain on each face, `(D/h) log(r_fwd/r_bwd)`.
pub fn effective_drift<T: Scalar>(spec: &ChainSpec<T>, model: &GridModel<T>) -> Vec<T> {
    let n = model.n_cells;
    let h = model.h();
    (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            model.diffusion[i] / h * (spec.rate(i, j).ln() - spec.rate(j, i).ln())
        })
        .collect()
}

/// `U = −log(π n)` from the discrete stationary measure.
pub fn potential<T: Scalar>(spec: &ChainSpec<T>) -> Result<Vec<T>> {
    let pi = stationary(spec)?;
    let n = T::count(spec.n_states());
    Ok(pi.values().iter().map(|&p| -(p * n).ln()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleForceSplit<T> {
    /// `f − D∇_h log ρ`
    pub force: Vec<T>,
    /// `−D∇_h U − D∇_h log ρ`
    pub symmetric: Vec<T>,
    /// `f + D∇_h U`
    pub antisymmetric: Vec<T>,
    pub recombination_defect: T,
    pub upwind_faces: Vec<usize>,
}

/// Per-face force and its split into the part driven by `dS` and the
/// non-reversible remainder.
pub fn example_force_split<T: Scalar>(
    model: &GridModel<T>,
    rho: &Density<T>,
) -> Result<ExampleForceSplit<T>> {
    let disc = discretize(model)?;
    rho.ensure_len(model.n_cells)?;
    if let Some(x) = rho.first_zero() {
        return Err(Error::ZeroDensity(x));
    }
    let h = model.h();
    let f = effective_drift(&disc.spec, model);
    let u = potential(&disc.spec)?;
    let log_rho: Vec<T> = rho.values().iter().map(|p| p.ln()).collect();
    let n = model.n_cells;
    let mut force = Vec::with_capacity(n);
    let mut sym = Vec::with_capacity(n);
    let mut asym = Vec::with_capacity(n);
    for i in 0..n {
        let d = model.diffusion[i];
        let grad_u = face_diff(&u, i) / h;
        let grad_log = face_diff(&log_rho, i) / h;
        force.push(f[i] - d * grad_log);
        sym.push(-d * grad_u - d * grad_log);
        asym.push(f[i] + d * grad_u);
    }
    let recombined: Vec<T> = sym.iter().zip(&asym).map(|(&s, &a)| s + a).collect();
    Ok(ExampleForceSplit {
        recombination_defect: max_abs_diff(&recombined, &force),
        force,
        symmetric: sym,
        antisymmetric: asym,
        upwind_faces: disc.upwind_faces,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualDrift<T> {
    /// `−(2D∇_h U + f)`
    pub f_star: Vec<T>,
    /// Drift realised by the adjoint chain.
    pub adjoint_drift: Vec<T>,
    pub drift_defect: T,
    /// Largest rate difference between the adjoint chain and the chain
    /// discretised from `f*`, relative to the largest rate.
    pub rate_defect: T,
}

pub fn dual_drift<T: Scalar>(model: &GridModel<T>) -> Result<DualDrift<T>> {
    let disc = discretize(model)?;
    let h = model.h();
    let f = effective_drift(&disc.spec, model);
    let u = potential(&disc.spec)?;
    let n = model.n_cells;
    let two = T::lit(2.0);
    let f_star: Vec<T> = (0..n)
        .map(|i| -(two * model.diffusion[i] * face_diff(&u, i) / h + f[i]))
        .collect();
    let adj = adjoint_chain(&disc.spec)?;
    let adjoint_drift = effective_drift(&adj, model);
    let rebuilt = discretize(&GridModel::new(n, f_star.clone(), model.diffusion.clone())?)?;
    let (a, b) = (adj.generator(), rebuilt.spec.generator());
    let rate_defect = a.matrix().max_abs_diff(b.matrix()) / disc.spec.max_escape_rate();
    Ok(DualDrift {
        drift_defect: max_abs_diff(&f_star, &adjoint_drift),
        f_star,
        adjoint_drift,
        rate_defect,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSplit<T> {
    /// `(W + W*)/2`
    pub symmetric: Matrix<T>,
    /// `(W − W*)/2`
    pub antisymmetric: Matrix<T>,
    pub mu: Density<T>,
    /// `‖W_a μ‖∞`
    pub antisym_on_mu: T,
    /// `‖W‖∞`
    pub generator_norm: T,
}

/// Split the forward generator into its `μ`-self-adjoint and
/// `μ`-anti-self-adjoint parts.
pub fn generator_split<T: Scalar>(model: &GridModel<T>) -> Result<GeneratorSplit<T>> {
    let disc = discretize(model)?;
    split_chain(&disc.spec)
}

fn split_chain<T: Scalar>(spec: &ChainSpec<T>) -> Result<GeneratorSplit<T>> {
    let mu = stationary(spec)?;
    let w = spec.generator();
    let ws = adjoint_chain(spec)?.generator();
    let (w, ws) = (w.matrix(), ws.matrix());
    let n = w.rows();
    let half = T::lit(0.5);
    let sym = Matrix::from_fn(n, n, |i, j| half * (w[(i, j)] + ws[(i, j)]));
    let asym = Matrix::from_fn(n, n, |i, j| half * (w[(i, j)] - ws[(i, j)]));
    let antisym_on_mu = max_abs(&asym.mul_vec(mu.values()));
    Ok(GeneratorSplit {
        symmetric: sym,
        antisymmetric: asym,
        mu,
        antisym_on_mu,
        generator_norm: w.norm_inf(),
    })
}

/// Three evaluations of the zero-flux Lagrangian on the grid chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExlReport<T> {
    pub n_cells: usize,
    /// (i) `sup_ξ −ℋ(ξ)` for the grid chain
    pub route_i: T,
    /// (ii) `𝓛_s(−W_a ρ)` with `ℋ_s = ℋ − ⟨W_a ρ, ·⟩`
    pub route_ii: T,
    /// (iii) `½Ψ_s(−W_a ρ) + ½Ψ*_s(dS)`
    pub route_iii: T,
    pub defect_i_ii: T,
    pub defect_ii_iii: T,
    /// `⟨dS, W_a ρ⟩` with `dS = log(ρ/μ)`
    pub orthogonality_defect: T,
    /// `Ψ*_s(dS)` from the Hamiltonian
    pub psi_star_ds: T,
    /// `½ Σ_faces D (∇_h dS)² ρ_face`, the continuum quadratic form
    pub quadratic_psi_star_ds: T,
    pub quadratic_defect: T,
    /// Largest gradient residual of the inner solves
    pub residual: T,
    pub upwind_faces: Vec<usize>,
}

pub fn exl_check<T: Scalar>(model: &GridModel<T>, rho: &Density<T>) -> Result<ExlReport<T>> {
    let disc = discretize(model)?;
    let spec = &disc.spec;
    let n = model.n_cells;
    rho.ensure_len(n)?;
    if let Some(x) = rho.first_zero() {
        return Err(Error::ZeroDensity(x));
    }
    let split = split_chain(spec)?;
    let w_a_rho = split.antisymmetric.mul_vec(rho.values());
    let minus_w: Vec<T> = w_a_rho.iter().map(|&v| -v).collect();
    let zero = vec![T::zero(); n];

    let h_jump: DynHamiltonian<T> = Arc::new(hamiltonian_from_generator(spec, rho)?);
    let i = legendre(h_jump.as_ref(), &zero)?;

    let lin: DynHamiltonian<T> = Arc::new(LinearHamiltonian::state_level(w_a_rho.clone())?);
    let h_s: DynHamiltonian<T> = Arc::new(SumHamiltonian::new(vec![
        (T::one(), Arc::clone(&h_jump)),
        (-T::one(), lin),
    ])?);
    let ii = legendre(h_s.as_ref(), &minus_w)?;

    let ds: Vec<T> = rho
        .values()
        .iter()
        .zip(split.mu.values())
        .map(|(&r, &m)| (r / m).ln())
        .collect();
    let ps = psi2_star(Arc::clone(&h_s), &ds)?;
    let psi_s = legendre(&ps, &minus_w)?;
    let psi_star_ds = ps.eval(&ds);
    let half = T::lit(0.5);
    let iii = half * psi_s.value + half * psi_star_ds;

    let hh = model.h();
    let quad = half
        * (0..n)
            .map(|f| {
                let g = face_diff(&ds, f) / hh;
                model.diffusion[f] * g * g * half * (rho[f] + rho[(f + 1) % n])
            })
            .sum::<T>();

    Ok(ExlReport {
        n_cells: n,
        route_i: i.value,
        route_ii: ii.value,
        route_iii: iii,
        defect_i_ii: (i.value - ii.value).abs(),
        defect_ii_iii: (ii.value - iii).abs(),
        orthogonality_defect: dot(&ds, &w_a_rho).abs(),
        psi_star_ds,
        quadratic_psi_star_ds: quad,
        quadratic_defect: (quad - psi_star_ds).abs(),
        residual: i.residual.max(ii.residual).max(psi_s.residual),
        upwind_faces: disc.upwind_faces,
    })
}
