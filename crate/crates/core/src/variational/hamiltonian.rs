//! Hamiltonians of the jump-process large deviations, as convex functions of
//! the tilt `ξ` at a fixed density.
//!
//! Two parametrisations are used. Edge-level: `ξ` is one number per
//! undirected edge,
//!
//! ```text
//! ℋ(ξ) = Σ a_xy [cosh(F_xy/2 + ξ_xy) − cosh(F_xy/2)].
//! ```
//!
//! State-level: `ξ` is a potential on states,
//!
//! ```text
//! ℋ(ξ) = Σ_x ρ(x) Σ_y r_xy (e^{ξ(y) − ξ(x)} − 1),
//! ```
//!
//! which is invariant under adding a constant to `ξ`. The two agree through
//! the discrete gradient: `ℋ_state(ξ) = ℋ_edge(∇ξ)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, Density};
use crate::error::{Error, Result};
use crate::force_flux::{mobility_force, EdgeField, EdgeSet};
use crate::scalar::Scalar;
use crate::solvers::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    Edge,
    State,
    /// Anything else: sums of mixed parts, conjugates, test functions.
    Generic,
}

/// Directions along which a Hamiltonian is constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    None,
    /// `ℋ(ξ + c·1) = ℋ(ξ)`
    Constant,
}

/// A smooth convex function of the tilt, at a density fixed at construction.
pub trait Hamiltonian<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;
    fn kind(&self) -> HamiltonianKind;
    fn gauge(&self) -> Gauge {
        Gauge::None
    }
    /// Whether `ℋ(0) = 0` by construction.
    fn vanishes_at_zero(&self) -> bool {
        true
    }
    fn eval(&self, xi: &[T]) -> T;
    fn grad(&self, xi: &[T]) -> Vec<T>;
    fn hessian(&self, xi: &[T]) -> Matrix<T>;
}

pub type DynHamiltonian<T> = Arc<dyn Hamiltonian<T>>;

fn check_dim<T>(expected: usize, xi: &[T]) {
    assert_eq!(xi.len(), expected, "tilt has wrong dimension");
}

/// Edge-level Hamiltonian built from mobility and force, optionally switched
/// off on some edges. Partial versions add up to the full one.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeHamiltonian<T> {
    edges: Arc<EdgeSet>,
    mobility: Vec<T>,
    half_force: Vec<T>,
    active: Vec<bool>,
}

impl<T: Scalar> EdgeHamiltonian<T> {
    pub fn new(mobility: &[T], force: &EdgeField<T>) -> Result<Self> {
        if mobility.len() != force.values().len() {
            return Err(Error::DimensionMismatch {
                expected: force.values().len(),
                got: mobility.len(),
            });
        }
        let half = T::lit(0.5);
        Ok(Self {
            edges: Arc::clone(force.edges()),
            mobility: mobility.to_vec(),
            half_force: force.values().iter().map(|&f| half * f).collect(),
            active: vec![true; mobility.len()],
        })
    }

    /// The same Hamiltonian restricted to the edges at the given positions.
    pub fn restricted(&self, indices: &[usize]) -> Result<Self> {
        let mut active = vec![false; self.mobility.len()];
        for &i in indices {
            *active.get_mut(i).ok_or_else(|| {
                Error::InvalidArgument(format!("edge index {i} out of range"))
            })? = true;
        }
        Ok(Self {
            active,
            ..self.clone()
        })
    }

    pub fn edges(&self) -> &Arc<EdgeSet> {
        &self.edges
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    /// `F` as an edge field.
    pub fn force(&self) -> EdgeField<T> {
        let two = T::lit(2.0);
        EdgeField::new(
            Arc::clone(&self.edges),
            self.half_force.iter().map(|&h| two * h).collect(),
        )
        .expect("sizes agree")
    }

    pub fn mobility(&self) -> &[T] {
        &self.mobility
    }
}

impl<T: Scalar> Hamiltonian<T> for EdgeHamiltonian<T> {
    fn dim(&self) -> usize {
        self.mobility.len()
    }
    fn kind(&self) -> HamiltonianKind {
        HamiltonianKind::Edge
    }
    fn eval(&self, xi: &[T]) -> T {
        check_dim(self.dim(), xi);
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        // cosh(A + ξ) − cosh(A) = 2 sinh(A + ξ/2) sinh(ξ/2), exact zero at ξ = 0
        (0..xi.len())
            .filter(|&e| self.active[e])
            .map(|e| {
                let s = half * xi[e];
                two * self.mobility[e] * (self.half_force[e] + s).sinh() * s.sinh()
            })
            .sum()
    }
    fn grad(&self, xi: &[T]) -> Vec<T> {
        check_dim(self.dim(), xi);
        (0..xi.len())
            .map(|e| {
                if self.active[e] {
                    self.mobility[e] * (self.half_force[e] + xi[e]).sinh()
                } else {
                    T::zero()
                }
            })
            .collect()
    }
    fn hessian(&self, xi: &[T]) -> Matrix<T> {
        check_dim(self.dim(), xi);
        let n = xi.len();
        Matrix::from_fn(n, n, |i, j| {
            if i == j && self.active[i] {
                self.mobility[i] * (self.half_force[i] + xi[i]).cosh()
            } else {
                T::zero()
            }
        })
    }
}

/// State-level Hamiltonian of a chain at density `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateHamiltonian<T> {
    n: usize,
    /// `(x, y, ρ(x) r_xy)` for every positive rate
    activity: Vec<(usize, usize, T)>,
}

impl<T: Scalar> StateHamiltonian<T> {
    pub fn new(spec: &ChainSpec<T>, rho: &Density<T>) -> Result<Self> {
        rho.ensure_len(spec.n_states())?;
        let activity = spec
            .triples()
            .into_iter()
            .filter(|&(_, _, r)| r > T::zero())
            .map(|(x, y, r)| (x, y, rho[x] * r))
            .collect();
        Ok(Self {
            n: spec.n_states(),
            activity,
        })
    }
}

impl<T: Scalar> Hamiltonian<T> for StateHamiltonian<T> {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind(&self) -> HamiltonianKind {
        HamiltonianKind::State
    }
    fn gauge(&self) -> Gauge {
        Gauge::Constant
    }
    fn eval(&self, xi: &[T]) -> T {
        check_dim(self.n, xi);
        self.activity
            .iter()
            .map(|&(x, y, k)| k * (xi[y] - xi[x]).exp_m1())
            .sum()
    }
    fn grad(&self, xi: &[T]) -> Vec<T> {
        check_dim(self.n, xi);
        let mut g = vec![T::zero(); self.n];
        for &(x, y, k) in &self.activity {
            let t = k * (xi[y] - xi[x]).exp();
            g[y] = g[y] + t;
            g[x] = g[x] - t;
        }
        g
    }
    fn hessian(&self, xi: &[T]) -> Matrix<T> {
        check_dim(self.n, xi);
        let mut h = Matrix::zeros(self.n, self.n);
        for &(x, y, k) in &self.activity {
            let t = k * (xi[y] - xi[x]).exp();
            h[(x, x)] = h[(x, x)] + t;
            h[(y, y)] = h[(y, y)] + t;
            h[(x, y)] = h[(x, y)] - t;
            h[(y, x)] = h[(y, x)] - t;
        }
        h
    }
}

/// `ℋ(ξ) = ⟨w, ξ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearHamiltonian<T> {
    w: Vec<T>,
    gauge: Gauge,
}

impl<T: Scalar> LinearHamiltonian<T> {
    pub fn new(w: Vec<T>) -> Self {
        Self {
            w,
            gauge: Gauge::None,
        }
    }

    /// For a state-level `w` with `Σ w = 0`, which makes `ℋ` gauge invariant.
    pub fn state_level(w: Vec<T>) -> Result<Self> {
        let sum: T = w.iter().copied().sum();
        let scale = w.iter().fold(T::one(), |m, v| m.max(v.abs()));
        if sum.abs() > T::tol(1e-10) * scale * T::count(w.len().max(1)) {
            return Err(Error::InvalidArgument(format!(
                "state-level linear part must sum to zero, got {sum}"
            )));
        }
        Ok(Self {
            w,
            gauge: Gauge::Constant,
        })
    }

    pub fn coefficients(&self) -> &[T] {
        &self.w
    }
}

impl<T: Scalar> Hamiltonian<T> for LinearHamiltonian<T> {
    fn dim(&self) -> usize {
        self.w.len()
    }
    fn kind(&self) -> HamiltonianKind {
        HamiltonianKind::Generic
    }
    fn gauge(&self) -> Gauge {
        self.gauge
    }
    fn eval(&self, xi: &[T]) -> T {
        check_dim(self.w.len(), xi);
        crate::scalar::dot(&self.w, xi)
    }
    fn grad(&self, xi: &[T]) -> Vec<T> {
        check_dim(self.w.len(), xi);
        self.w.clone()
    }
    fn hessian(&self, _xi: &[T]) -> Matrix<T> {
        Matrix::zeros(self.w.len(), self.w.len())
    }
}

/// A Hamiltonian that does not depend on `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantHamiltonian<T> {
    pub dim: usize,
    pub value: T,
}

impl<T: Scalar> Hamiltonian<T> for ConstantHamiltonian<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn kind(&self) -> HamiltonianKind {
        HamiltonianKind::Generic
    }
    fn gauge(&self) -> Gauge {
        Gauge::Constant
    }
    fn vanishes_at_zero(&self) -> bool {
        self.value == T::zero()
    }
    fn eval(&self, _xi: &[T]) -> T {
        self.value
    }
    fn grad(&self, _xi: &[T]) -> Vec<T> {
        vec![T::zero(); self.dim]
    }
    fn hessian(&self, _xi: &[T]) -> Matrix<T> {
        Matrix::zeros(self.dim, self.dim)
    }
}

/// Weighted sum `Σ c_k ℋ_k`. Negative weights are allowed (e.g. to peel off a
/// linear part); convexity of the result is not checked here.
#[derive(Clone)]
pub struct SumHamiltonian<T> {
    parts: Vec<(T, DynHamiltonian<T>)>,
}

impl<T: Scalar> SumHamiltonian<T> {
    pub fn new(parts: Vec<(T, DynHamiltonian<T>)>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidArgument("empty sum".into()));
        };
        let d = first.1.dim();
        if let Some(p) = parts.iter().find(|p| p.1.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.1.dim(),
            });
        }
        Ok(Self { parts })
    }

    pub fn pair(a: DynHamiltonian<T>, b: DynHamiltonian<T>) -> Result<Self> {
        Self::new(vec![(T::one(), a), (T::one(), b)])
    }
}

impl<T: Scalar> Hamiltonian<T> for SumHamiltonian<T> {
    fn dim(&self) -> usize {
        self.parts[0].1.dim()
    }
    fn kind(&self) -> HamiltonianKind {
        let k = self.parts[0].1.kind();
        if self.parts.iter().all(|p| p.1.kind() == k) {
            k
        } else {
            HamiltonianKind::Generic
        }
    }
    fn gauge(&self) -> Gauge {
        if self.parts.iter().all(|p| p.1.gauge() == Gauge::Constant) {
            Gauge::Constant
        } else {
            Gauge::None
        }
    }
    fn vanishes_at_zero(&self) -> bool {
        self.parts.iter().all(|p| p.1.vanishes_at_zero())
    }
    fn eval(&self, xi: &[T]) -> T {
        self.parts.iter().map(|(c, h)| *c * h.eval(xi)).sum()
    }
    fn grad(&self, xi: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.dim()];
        for (c, h) in &self.parts {
            for (gi, hi) in g.iter_mut().zip(h.grad(xi)) {
                *gi = *gi + *c * hi;
            }
        }
        g
    }
    fn hessian(&self, xi: &[T]) -> Matrix<T> {
        let n = self.dim();
        let mats: Vec<(T, Matrix<T>)> = self.parts.iter().map(|(c, h)| (*c, h.hessian(xi))).collect();
        Matrix::from_fn(n, n, |i, j| mats.iter().map(|(c, m)| *c * m[(i, j)]).sum())
    }
}

/// `Ψ*(ξ) = 2[ℋ((ξ − F)/2) − ℋ(−F/2)]` built from any Hamiltonian.
///
/// With `F = −dS` this is the dissipation potential attached to a reversible
/// Hamiltonian.
#[derive(Clone)]
pub struct PsiStarFromHamiltonian<T> {
    inner: DynHamiltonian<T>,
    /// `−F/2`
    base: Vec<T>,
    offset: T,
}

impl<T: Scalar> PsiStarFromHamiltonian<T> {
    pub fn new(inner: DynHamiltonian<T>, force: &[T]) -> Result<Self> {
        if force.len() != inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: inner.dim(),
                got: force.len(),
            });
        }
        let base: Vec<T> = force.iter().map(|&f| -T::lit(0.5) * f).collect();
        let offset = inner.eval(&base);
        Ok(Self {
            inner,
            base,
            offset,
        })
    }

    fn shifted(&self, xi: &[T]) -> Vec<T> {
        let half = T::lit(0.5);
        xi.iter().zip(&self.base).map(|(&x, &b)| half * x + b).collect()
    }
}

impl<T: Scalar> Hamiltonian<T> for PsiStarFromHamiltonian<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn kind(&self) -> HamiltonianKind {
        HamiltonianKind::Generic
    }
    fn gauge(&self) -> Gauge {
        self.inner.gauge()
    }
    fn eval(&self, xi: &[T]) -> T {
        T::lit(2.0) * (self.inner.eval(&self.shifted(xi)) - self.offset)
    }
    fn grad(&self, xi: &[T]) -> Vec<T> {
        self.inner.grad(&self.shifted(xi))
    }
    fn hessian(&self, xi: &[T]) -> Matrix<T> {
        let h = self.inner.hessian(&self.shifted(xi));
        let half = T::lit(0.5);
        Matrix::from_fn(h.rows(), h.cols(), |i, j| half * h[(i, j)])
    }
}

/// Hamiltonian given by closures, mainly for experiments and tests.
pub struct FnHamiltonian<V, G, H> {
    pub dim: usize,
    pub gauge: Gauge,
    pub eval: V,
    pub grad: G,
    pub hessian: H,
}

impl<T, V, G, H> Hamiltonian<T> for FnHamiltonian<V, G, H>
where
    T: Scalar,
    V: Fn(&[T]) -> T + Send + Sync,
    G: Fn(&[T]) -> Vec<T> + Send + Sync,
    H: Fn(&[T]) -> Matrix<T> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn kind(&self) -> HamiltonianKind {
        HamiltonianKind::Generic
    }
    fn gauge(&self) -> Gauge {
        self.gauge
    }
    fn eval(&self, xi: &[T]) -> T {
        (self.eval)(xi)
    }
    fn grad(&self, xi: &[T]) -> Vec<T> {
        (self.grad)(xi)
    }
    fn hessian(&self, xi: &[T]) -> Matrix<T> {
        (self.hessian)(xi)
    }
}

/// Edge-level Hamiltonian `½[Ψ*(F + 2ξ) − Ψ*(F)]` of a chain at `ρ`.
pub fn hamiltonian_from_psi<T: Scalar>(
    spec: &ChainSpec<T>,
    rho: &Density<T>,
) -> Result<EdgeHamiltonian<T>> {
    let (mob, force) = mobility_force(spec, rho)?;
    EdgeHamiltonian::new(mob.values(), &force)
}

/// State-level Hamiltonian `Σ_x ρ(x) Σ_y r_xy (e^{ξ(y) − ξ(x)} − 1)`.
pub fn hamiltonian_from_generator<T: Scalar>(
    spec: &ChainSpec<T>,
    rho: &Density<T>,
) -> Result<StateHamiltonian<T>> {
    StateHamiltonian::new(spec, rho)
}

/// `2[ℋ((ξ − F)/2) − ℋ(−F/2)]`.
pub fn recover_psi_star<T: Scalar>(h: &dyn Hamiltonian<T>, force: &[T], xi: &[T]) -> T {
    let half = T::lit(0.5);
    let a: Vec<T> = xi.iter().zip(force).map(|(&x, &f)| half * (x - f)).collect();
    let b: Vec<T> = force.iter().map(|&f| -half * f).collect();
    T::lit(2.0) * (h.eval(&a) - h.eval(&b))
}
