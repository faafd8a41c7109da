//! Finite Markov jump processes: rates, densities, the forward generator,
//! stationary measures and master-equation evolution.
//!
//! Convention: the generator is stored in its forward (density) form `W`,
//! with `W[(y, x)] = r_xy` for `x ≠ y`, so that `ρ̇ = W ρ` and every column
//! sums to zero. The backward generator acting on observables is `Wᵀ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solvers::{rk4_step, solve, Matrix};

/// Transition rates of a finite, time-homogeneous Markov jump process.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec<T> {
    rates: Matrix<T>,
    labels: Option<Vec<String>>,
}

impl<T: Scalar> ChainSpec<T> {
    /// Build from `(x, y, r_xy)` triples. Repeated pairs accumulate. Diagonal
    /// entries, out-of-range indices and non-finite rates are rejected;
    /// negative rates are accepted here and flagged by [`validate`].
    pub fn new(n_states: usize, rates: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        if n_states == 0 {
            return Err(Error::InvalidSpec("chain needs at least one state".into()));
        }
        let mut m = Matrix::zeros(n_states, n_states);
        for (x, y, r) in rates {
            if x >= n_states || y >= n_states {
                return Err(Error::InvalidSpec(format!(
                    "edge ({x},{y}) out of range for {n_states} states"
                )));
            }
            if x == y {
                return Err(Error::InvalidSpec(format!("diagonal rate at state {x}")));
            }
            if !r.is_finite() {
                return Err(Error::InvalidSpec(format!("non-finite rate on ({x},{y})")));
            }
            m[(x, y)] = m[(x, y)] + r;
        }
        Ok(Self {
            rates: m,
            labels: None,
        })
    }

    /// Build from a dense rate matrix `r[(x, y)]`; the diagonal is ignored.
    pub fn from_rate_matrix(rates: &Matrix<T>) -> Result<Self> {
        let n = rates.rows();
        if rates.cols() != n {
            return Err(Error::InvalidSpec("rate matrix must be square".into()));
        }
        let triples = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| x != y && rates[(x, y)] != T::zero())
            .map(|(x, y)| (x, y, rates[(x, y)]));
        Self::new(n, triples)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_states() {
            return Err(Error::InvalidSpec(format!(
                "{} labels for {} states",
                labels.len(),
                self.n_states()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.rates.rows()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn rate(&self, x: usize, y: usize) -> T {
        if x == y {
            T::zero()
        } else {
            self.rates[(x, y)]
        }
    }

    /// Total escape rate `Σ_{y≠x} r_xy`.
    pub fn escape_rate(&self, x: usize) -> T {
        (0..self.n_states()).map(|y| self.rate(x, y)).sum()
    }

    pub fn max_escape_rate(&self) -> T {
        (0..self.n_states())
            .map(|x| self.escape_rate(x))
            .fold(T::zero(), T::max)
    }

    /// Nonzero rates as `(x, y, r_xy)` in row-major order.
    pub fn triples(&self) -> Vec<(usize, usize, T)> {
        let n = self.n_states();
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| x != y && self.rates[(x, y)] != T::zero())
            .map(|(x, y)| (x, y, self.rates[(x, y)]))
            .collect()
    }

    /// Undirected pairs `x < y` carrying a rate in at least one direction.
    pub fn support_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_states();
        (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .filter(|&(x, y)| self.rate(x, y) > T::zero() || self.rate(y, x) > T::zero())
            .collect()
    }

    /// The same chain with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let n = self.n_states();
        Self {
            rates: Matrix::from_fn(n, n, |x, y| self.rates[(x, y)] * factor),
            labels: self.labels.clone(),
        }
    }

    pub fn generator(&self) -> GeneratorMatrix<T> {
        GeneratorMatrix::from_spec(self)
    }

    /// Error unless rates are nonnegative and the chain is irreducible.
    pub fn ensure_ergodic(&self) -> Result<()> {
        let report = validate(self);
        if !report.rates_nonnegative {
            return Err(Error::InvalidSpec("negative rate".into()));
        }
        if !report.irreducible {
            return Err(Error::NotIrreducible);
        }
        Ok(())
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_states: usize,
    pub n_edges: usize,
    pub rates_nonnegative: bool,
    pub irreducible: bool,
    pub support_symmetric: bool,
    /// Ordered pairs `(x, y)` with `r_xy > 0` but `r_yx = 0`.
    pub asymmetric_edges: Vec<(usize, usize)>,
    /// Nonnegative, irreducible and support-symmetric.
    pub valid: bool,
}

fn reachable<T: Scalar>(spec: &ChainSpec<T>, forward: bool) -> Vec<bool> {
    let n = spec.n_states();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for y in 0..n {
            let r = if forward { spec.rate(x, y) } else { spec.rate(y, x) };
            if !seen[y] && r > T::zero() {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Check rate positivity, irreducibility (forward and backward reachability
/// from state 0) and symmetry of the edge support.
pub fn validate<T: Scalar>(spec: &ChainSpec<T>) -> ValidationReport {
    let n = spec.n_states();
    let rates_nonnegative = spec.triples().iter().all(|&(_, _, r)| r >= T::zero());
    let irreducible = reachable(spec, true).into_iter().all(|b| b)
        && reachable(spec, false).into_iter().all(|b| b);
    let asymmetric_edges: Vec<(usize, usize)> = spec
        .triples()
        .into_iter()
        .filter(|&(x, y, r)| r > T::zero() && !(spec.rate(y, x) > T::zero()))
        .map(|(x, y, _)| (x, y))
        .collect();
    let support_symmetric = asymmetric_edges.is_empty();
    ValidationReport {
        n_states: n,
        n_edges: spec.support_pairs().len(),
        rates_nonnegative,
        irreducible,
        support_symmetric,
        asymmetric_edges,
        valid: rates_nonnegative && irreducible && support_symmetric,
    }
}

/// Probability vector over the states of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Density<T> {
    values: Vec<T>,
}

impl<T: Scalar> Density<T> {
    /// Accepts nonnegative entries summing to one within `Scalar::tol(1e-12)`.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDensity("empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidDensity(format!("entry {i} is negative or non-finite")));
        }
        let total: T = values.iter().copied().sum();
        let defect = (total - T::one()).abs();
        if defect > T::tol(1e-12) * T::count(values.len()).max(T::one()) {
            return Err(Error::InvalidDensity(format!(
                "mass {} differs from 1",
                total.to_f64_lossy()
            )));
        }
        Ok(Self { values })
    }

    /// Rescale nonnegative weights to unit mass.
    pub fn normalized(weights: Vec<T>) -> Result<Self> {
        if weights.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidDensity("weights must be finite and nonnegative".into()));
        }
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::InvalidDensity("weights have zero mass".into()));
        }
        Ok(Self {
            values: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            values: vec![T::one() / T::count(n); n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// First state with zero mass, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.values.iter().position(|&v| !(v > T::zero()))
    }

    pub fn ensure_len(&self, n: usize) -> Result<()> {
        if self.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                got: self.len(),
            })
        }
    }
}

impl<T> std::ops::Index<usize> for Density<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}

/// Forward generator `W` with `W[(y, x)] = r_xy` and zero column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix<T> {
    w: Matrix<T>,
}

impl<T: Scalar> GeneratorMatrix<T> {
    pub fn from_spec(spec: &ChainSpec<T>) -> Self {
        let n = spec.n_states();
        let mut w = Matrix::zeros(n, n);
        for x in 0..n {
            let mut out = T::zero();
            for y in 0..n {
                if y != x {
                    let r = spec.rate(x, y);
                    w[(y, x)] = r;
                    out = out + r;
                }
            }
            w[(x, x)] = -out;
        }
        Self { w }
    }

    /// Wrap an arbitrary square matrix (used for split and adjoint operators).
    pub fn from_matrix(w: Matrix<T>) -> Self {
        assert_eq!(w.rows(), w.cols());
        Self { w }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.w
    }

    pub fn n_states(&self) -> usize {
        self.w.rows()
    }

    /// `W ρ`, the right-hand side of the master equation.
    pub fn apply(&self, rho: &[T]) -> Vec<T> {
        self.w.mul_vec(rho)
    }

    /// Backward generator `Wᵀ`, acting on observables.
    pub fn backward(&self) -> Matrix<T> {
        self.w.transpose()
    }

    /// `max_x |Σ_y W[(y, x)]|`.
    pub fn column_sum_defect(&self) -> T {
        let n = self.n_states();
        (0..n)
            .map(|x| (0..n).map(|y| self.w[(y, x)]).sum::<T>().abs())
            .fold(T::zero(), T::max)
    }

    pub fn norm_inf(&self) -> T {
        self.w.norm_inf()
    }
}

/// Unique invariant measure of an irreducible chain.
///
/// Solves `W π = 0` with one equation replaced by `Σ π = 1` (dense LU).
pub fn stationary<T: Scalar>(spec: &ChainSpec<T>) -> Result<Density<T>> {
    spec.ensure_ergodic()?;
    let g = spec.generator();
    let n = spec.n_states();
    let mut a = g.matrix().clone();
    for j in 0..n {
        a[(n - 1, j)] = T::one();
    }
    let mut b = vec![T::zero(); n];
    b[n - 1] = T::one();
    let pi = solve(&a, &b)?;
    if pi.iter().any(|v| !(*v > T::zero())) {
        return Err(Error::SingularSystem);
    }
    Density::normalized(pi)
}

/// `‖W π‖∞ / ‖W‖∞`.
pub fn stationary_residual<T: Scalar>(spec: &ChainSpec<T>, pi: &Density<T>) -> T {
    let g = spec.generator();
    let r = crate::scalar::max_abs(&g.apply(pi.values()));
    r / g.norm_inf().max(T::min_positive_value())
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution<T> {
    pub times: Vec<T>,
    pub densities: Vec<Density<T>>,
    /// Largest `|Σρ − 1|` seen before renormalising a step.
    pub max_mass_defect: T,
}

/// Integrate `ρ̇ = W ρ` on `[0, t_end]` with fixed-step RK4.
///
/// The final step is shortened to land exactly on `t_end`. Each output is
/// renormalised; the largest pre-renormalisation defect is reported.
pub fn evolve<T: Scalar>(
    spec: &ChainSpec<T>,
    rho0: &Density<T>,
    t_end: T,
    dt: T,
) -> Result<Evolution<T>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    if !(t_end >= T::zero()) || !t_end.is_finite() {
        return Err(Error::InvalidArgument("t_end must be nonnegative".into()));
    }
    rho0.ensure_len(spec.n_states())?;
    let g = spec.generator();
    let negative_floor = -T::tol(1e-8);
    let mut t = T::zero();
    let mut rho = rho0.values().to_vec();
    let mut times = vec![t];
    let mut densities = vec![rho0.clone()];
    let mut max_defect = T::zero();
    let eps_t = dt * T::lit(1e-9);
    while t_end - t > eps_t {
        let h = dt.min(t_end - t);
        let next = rk4_step(|v: &[T]| g.apply(v), &rho, h);
        t = if t_end - (t + h) <= eps_t { t_end } else { t + h };
        if let Some((state, &value)) = next
            .iter()
            .enumerate()
            .find(|(_, &v)| v < negative_floor || !v.is_finite())
        {
            return Err(Error::StepTooLarge {
                state,
                value: value.to_f64_lossy(),
                time: t.to_f64_lossy(),
            });
        }
        let clipped: Vec<T> = next.iter().map(|&v| v.max(T::zero())).collect();
        let mass: T = next.iter().copied().sum();
        max_defect = max_defect.max((mass - T::one()).abs());
        let d = Density::normalized(clipped)?;
        rho = d.values().to_vec();
        times.push(t);
        densities.push(d);
    }
    Ok(Evolution {
        times,
        densities,
        max_mass_defect: max_defect,
    })
}
