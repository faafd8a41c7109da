//! Edge-level thermodynamics of a jump process.
//!
//! For a chain with rates `r_xy` and a positive density `ρ`, each
//! bidirectional edge carries
//!
//! ```text
//! a_xy = 2 √(ρ(x) r_xy ρ(y) r_yx)          mobility
//! F_xy = log(ρ(x) r_xy / (ρ(y) r_yx))       force
//! j_xy = a_xy sinh(F_xy / 2)                flux = ρ(x) r_xy − ρ(y) r_yx
//! ```
//!
//! Edge fields are antisymmetric and stored once per undirected edge `x < y`.
//! The pairing `⟨u, v⟩` sums over undirected edges, so that the dissipation
//! potentials
//!
//! ```text
//! Ψ*(f) = Σ 2a (cosh(f/2) − 1)
//! Ψ(j)  = Σ 2j arsinh(j/a) − 2√(a² + j²) + 2a
//! ```
//!
//! are Legendre conjugate under it and `∂Ψ*/∂f = a sinh(f/2)`.
//! The entropy production rate is `e = 2⟨j, F⟩`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, Density};
use crate::error::{Error, Result};
use crate::scalar::{max_abs, Scalar};
use crate::solvers::{arsinh, bisect, cosh_m1, legendre_oracle, GridSpec};

/// Undirected edges `(x, y)` with `x < y`, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeSet {
    n_states: usize,
    pairs: Vec<(usize, usize)>,
}

impl EdgeSet {
    /// Pairs may be given in either orientation; duplicates are rejected.
    pub fn new(n_states: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (x, y) in pairs {
            if x == y || x >= n_states || y >= n_states {
                return Err(Error::InvalidArgument(format!("bad edge ({x},{y})")));
            }
            let p = (x.min(y), x.max(y));
            if out.contains(&p) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({x},{y})")));
            }
            out.push(p);
        }
        Ok(Self {
            n_states,
            pairs: out,
        })
    }

    /// Bidirectional edges of a chain; errors with [`Error::ZeroRate`] if some
    /// edge carries a rate in one direction only.
    pub fn of_chain<T: Scalar>(spec: &ChainSpec<T>) -> Result<Self> {
        let pairs = spec.support_pairs();
        for &(x, y) in &pairs {
            let (fwd, bwd) = (spec.rate(x, y), spec.rate(y, x));
            if !(fwd > T::zero()) {
                return Err(Error::ZeroRate { x: y, y: x });
            }
            if !(bwd > T::zero()) {
                return Err(Error::ZeroRate { x, y });
            }
        }
        Ok(Self {
            n_states: spec.n_states(),
            pairs,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Position of the undirected edge `{x, y}` and the orientation sign
    /// (`+1` when `x < y`).
    pub fn locate(&self, x: usize, y: usize) -> Option<(usize, i8)> {
        let (p, s) = if x < y { ((x, y), 1) } else { ((y, x), -1) };
        self.pairs.iter().position(|&q| q == p).map(|i| (i, s))
    }

    /// Sub-set of edges selected by position.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let pairs = indices
            .iter()
            .map(|&i| {
                self.pairs
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("edge index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        EdgeSet::new(self.n_states, pairs)
    }
}

fn same_support(a: &Arc<EdgeSet>, b: &Arc<EdgeSet>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::SupportMismatch)
    }
}

/// Antisymmetric function on the ordered pairs of an [`EdgeSet`]; houses
/// forces, fluxes and edge tilts. `values[i]` is the value on `pairs[i]` in
/// its `x < y` orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeField<T> {
    edges: Arc<EdgeSet>,
    values: Vec<T>,
}

impl<T: Scalar> EdgeField<T> {
    pub fn new(edges: Arc<EdgeSet>, values: Vec<T>) -> Result<Self> {
        if values.len() != edges.len() {
            return Err(Error::DimensionMismatch {
                expected: edges.len(),
                got: values.len(),
            });
        }
        Ok(Self { edges, values })
    }

    pub fn zeros(edges: Arc<EdgeSet>) -> Self {
        let n = edges.len();
        Self {
            edges,
            values: vec![T::zero(); n],
        }
    }

    /// Build from `(x, y, u_xy)` triples in any orientation. Missing edges are zero.
    pub fn from_triples(
        edges: Arc<EdgeSet>,
        triples: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut f = Self::zeros(edges);
        for (x, y, v) in triples {
            let (i, s) = f
                .edges
                .locate(x, y)
                .ok_or_else(|| Error::InvalidArgument(format!("({x},{y}) is not an edge")))?;
            f.values[i] = if s > 0 { v } else { -v };
        }
        Ok(f)
    }

    /// Discrete gradient of a state function: `(∇ξ)_xy = ξ(y) − ξ(x)`.
    pub fn gradient_of(edges: Arc<EdgeSet>, xi: &[T]) -> Result<Self> {
        if xi.len() != edges.n_states() {
            return Err(Error::DimensionMismatch {
                expected: edges.n_states(),
                got: xi.len(),
            });
        }
        let values = edges.pairs().iter().map(|&(x, y)| xi[y] - xi[x]).collect();
        Ok(Self { edges, values })
    }

    pub fn edges(&self) -> &Arc<EdgeSet> {
        &self.edges
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// `u_xy` for any ordered pair; zero off the support.
    pub fn get(&self, x: usize, y: usize) -> T {
        match self.edges.locate(x, y) {
            Some((i, s)) if s > 0 => self.values[i],
            Some((i, _)) => -self.values[i],
            None => T::zero(),
        }
    }

    /// `(x, y, u_xy)` with `x < y`.
    pub fn triples(&self) -> Vec<(usize, usize, T)> {
        self.edges
            .pairs()
            .iter()
            .zip(&self.values)
            .map(|(&(x, y), &v)| (x, y, v))
            .collect()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            edges: Arc::clone(&self.edges),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        same_support(&self.edges, &other.edges)?;
        Ok(Self {
            edges: Arc::clone(&self.edges),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.values)
    }
}

/// Symmetric edge mobility `a_xy > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mobility<T> {
    edges: Arc<EdgeSet>,
    values: Vec<T>,
}

impl<T: Scalar> Mobility<T> {
    pub fn new(edges: Arc<EdgeSet>, values: Vec<T>) -> Result<Self> {
        if values.len() != edges.len() {
            return Err(Error::DimensionMismatch {
                expected: edges.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|a| !(*a > T::zero()) || !a.is_finite()) {
            return Err(Error::InvalidArgument("mobility must be positive".into()));
        }
        Ok(Self { edges, values })
    }

    pub fn edges(&self) -> &Arc<EdgeSet> {
        &self.edges
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    fn check(&self, f: &EdgeField<T>) -> Result<()> {
        same_support(&self.edges, &f.edges)
    }
}

/// `a_xy` and `F_xy` on the bidirectional edges of `spec` at density `rho`.
pub fn mobility_force<T: Scalar>(
    spec: &ChainSpec<T>,
    rho: &Density<T>,
) -> Result<(Mobility<T>, EdgeField<T>)> {
    rho.ensure_len(spec.n_states())?;
    let edges = Arc::new(EdgeSet::of_chain(spec)?);
    let mut a = Vec::with_capacity(edges.len());
    let mut f = Vec::with_capacity(edges.len());
    for &(x, y) in edges.pairs() {
        for s in [x, y] {
            if !(rho[s] > T::zero()) {
                return Err(Error::ZeroDensity(s));
            }
        }
        let fwd = rho[x] * spec.rate(x, y);
        let bwd = rho[y] * spec.rate(y, x);
        a.push(T::lit(2.0) * fwd.sqrt() * bwd.sqrt());
        f.push(fwd.ln() - bwd.ln());
    }
    Ok((
        Mobility::new(Arc::clone(&edges), a)?,
        EdgeField { edges, values: f },
    ))
}

/// Net probability current `ρ(x) r_xy − ρ(y) r_yx` on the chain's edges,
/// computed directly from rates.
pub fn net_current<T: Scalar>(spec: &ChainSpec<T>, rho: &Density<T>) -> Result<EdgeField<T>> {
    rho.ensure_len(spec.n_states())?;
    let edges = Arc::new(EdgeSet::of_chain(spec)?);
    let values = edges
        .pairs()
        .iter()
        .map(|&(x, y)| rho[x] * spec.rate(x, y) - rho[y] * spec.rate(y, x))
        .collect();
    Ok(EdgeField { edges, values })
}

/// `j_xy = a_xy sinh(F_xy / 2)`.
pub fn flux<T: Scalar>(mob: &Mobility<T>, force: &EdgeField<T>) -> Result<EdgeField<T>> {
    mob.check(force)?;
    let half = T::lit(0.5);
    Ok(EdgeField {
        edges: Arc::clone(&force.edges),
        values: mob
            .values
            .iter()
            .zip(&force.values)
            .map(|(&a, &f)| a * (half * f).sinh())
            .collect(),
    })
}

/// `⟨u, v⟩ = Σ_{x<y} u_xy v_xy`.
pub fn pairing<T: Scalar>(u: &EdgeField<T>, v: &EdgeField<T>) -> Result<T> {
    same_support(&u.edges, &v.edges)?;
    Ok(u.values.iter().zip(&v.values).map(|(&a, &b)| a * b).sum())
}

/// `2a(cosh(f/2) − 1)` on one edge.
#[inline]
pub fn psi_star_edge<T: Scalar>(a: T, f: T) -> T {
    T::lit(2.0) * a * cosh_m1(f / T::lit(2.0))
}

/// `2j arsinh(j/a) − 2√(a² + j²) + 2a` on one edge.
#[inline]
pub fn psi_edge<T: Scalar>(a: T, j: T) -> T {
    let two = T::lit(2.0);
    let root = (a * a + j * j).sqrt();
    two * j * arsinh(j / a) - two * j * j / (root + a)
}

/// Closed-form dissipation potentials at fixed `ρ`, i.e. at fixed mobility.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationPair<T> {
    mobility: Mobility<T>,
}

impl<T: Scalar> DissipationPair<T> {
    pub fn new(mobility: Mobility<T>) -> Self {
        Self { mobility }
    }

    pub fn mobility(&self) -> &Mobility<T> {
        &self.mobility
    }

    pub fn psi_star(&self, f: &EdgeField<T>) -> Result<T> {
        psi_star(&self.mobility, f)
    }

    pub fn psi(&self, j: &EdgeField<T>) -> Result<T> {
        psi(&self.mobility, j)
    }

    /// `∂Ψ*/∂f_xy = a_xy sinh(f_xy/2)`.
    pub fn grad_psi_star(&self, f: &EdgeField<T>) -> Result<EdgeField<T>> {
        flux(&self.mobility, f)
    }

    /// `∂Ψ/∂j_xy = 2 arsinh(j_xy/a_xy)`.
    pub fn grad_psi(&self, j: &EdgeField<T>) -> Result<EdgeField<T>> {
        self.mobility.check(j)?;
        Ok(EdgeField {
            edges: Arc::clone(&j.edges),
            values: self
                .mobility
                .values
                .iter()
                .zip(&j.values)
                .map(|(&a, &v)| T::lit(2.0) * arsinh(v / a))
                .collect(),
        })
    }

    /// Grid-supremum conjugate of `Ψ*` restricted to the listed edges (one or
    /// two), evaluated at `slope`. Independent of the closed form of `Ψ`.
    pub fn psi_by_grid(&self, edge_indices: &[usize], slope: &[T], grid: &GridSpec) -> Result<T> {
        if edge_indices.len() != slope.len() {
            return Err(Error::DimensionMismatch {
                expected: edge_indices.len(),
                got: slope.len(),
            });
        }
        let a: Vec<T> = edge_indices
            .iter()
            .map(|&i| {
                self.mobility
                    .values
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("edge index {i} out of range")))
            })
            .collect::<Result<_>>()?;
        let f = |x: &[T]| -> T { x.iter().zip(&a).map(|(&xi, &ai)| psi_star_edge(ai, xi)).sum() };
        Ok(legendre_oracle(f, slope, grid)?.value)
    }
}

pub fn psi_star<T: Scalar>(mob: &Mobility<T>, f: &EdgeField<T>) -> Result<T> {
    mob.check(f)?;
    Ok(mob
        .values
        .iter()
        .zip(&f.values)
        .map(|(&a, &v)| psi_star_edge(a, v))
        .sum())
}

pub fn psi<T: Scalar>(mob: &Mobility<T>, j: &EdgeField<T>) -> Result<T> {
    mob.check(j)?;
    Ok(mob
        .values
        .iter()
        .zip(&j.values)
        .map(|(&a, &v)| psi_edge(a, v))
        .sum())
}

/// `e = 2⟨j, F⟩`.
pub fn entropy_production<T: Scalar>(j: &EdgeField<T>, force: &EdgeField<T>) -> Result<T> {
    Ok(T::lit(2.0) * pairing(j, force)?)
}

/// Bregman divergence of `Ψ`: `D[j1‖j2] = Ψ(j1) − Ψ(j2) − ⟨j1 − j2, ∇Ψ(j2)⟩`.
pub fn bregman<T: Scalar>(mob: &Mobility<T>, j1: &EdgeField<T>, j2: &EdgeField<T>) -> Result<T> {
    mob.check(j1)?;
    mob.check(j2)?;
    let two = T::lit(2.0);
    Ok(mob
        .values
        .iter()
        .zip(j1.values.iter().zip(&j2.values))
        .map(|(&a, (&u, &v))| psi_edge(a, u) - psi_edge(a, v) - (u - v) * two * arsinh(v / a))
        .sum())
}

/// Ways of picking a force on the `Ψ*` level set of a given force.
#[derive(Debug, Clone)]
pub enum IsoSelector<'a, T> {
    /// Flip the sign on the listed edge positions.
    SignFlip(Vec<usize>),
    /// Shift edge `first` by `delta` and re-solve edge `second` so that the
    /// total dissipation is unchanged. The corrected edge keeps its sign.
    TwoEdge { first: usize, second: usize, delta: T },
    /// The force of the time-reversed chain.
    Dual {
        spec: &'a ChainSpec<T>,
        rho: &'a Density<T>,
    },
}

/// A member `F_iso` of the level set `{Ψ*(F_iso) = Ψ*(F)}`.
pub fn iso_force_family<T: Scalar>(
    mob: &Mobility<T>,
    force: &EdgeField<T>,
    selector: &IsoSelector<'_, T>,
) -> Result<EdgeField<T>> {
    mob.check(force)?;
    let m = force.values.len();
    match selector {
        IsoSelector::SignFlip(which) => {
            let mut out = force.clone();
            for &i in which {
                if i >= m {
                    return Err(Error::InvalidArgument(format!("edge index {i} out of range")));
                }
                out.values[i] = -force.values[i];
            }
            Ok(out)
        }
        IsoSelector::TwoEdge {
            first,
            second,
            delta,
        } => {
            let (e1, e2, delta) = (*first, *second, *delta);
            if e1 >= m || e2 >= m || e1 == e2 {
                return Err(Error::InvalidArgument(format!(
                    "two-edge move needs distinct edges, got {e1} and {e2}"
                )));
            }
            let a1 = mob.values[e1];
            let a2 = mob.values[e2];
            let moved = force.values[e1] + delta;
            let required = psi_star_edge(a2, force.values[e2]) + psi_star_edge(a1, force.values[e1])
                - psi_star_edge(a1, moved);
            if !(required >= T::zero()) {
                return Err(Error::LevelSetInfeasible {
                    required: required.to_f64_lossy(),
                });
            }
            let g = |x: T| psi_star_edge(a2, x) - required;
            let mut hi = force.values[e2].abs().max(T::one());
            while g(hi) < T::zero() {
                hi = hi + hi;
                if !hi.is_finite() {
                    return Err(Error::LevelSetInfeasible {
                        required: required.to_f64_lossy(),
                    });
                }
            }
            let root = bisect(g, T::zero(), hi, T::tol(1e-12) * T::epsilon())?;
            let sign = if force.values[e2] < T::zero() {
                -T::one()
            } else {
                T::one()
            };
            let mut out = force.clone();
            out.values[e1] = moved;
            out.values[e2] = sign * root;
            Ok(out)
        }
        IsoSelector::Dual { spec, rho } => {
            let dual = crate::duality::dual_force(spec, rho)?;
            same_support(&force.edges, &dual.edges)?;
            Ok(EdgeField {
                edges: Arc::clone(&force.edges),
                values: dual.values,
            })
        }
    }
}

/// `F_S = (F + F_iso)/2`, `F_A = (F − F_iso)/2`.
pub fn force_split<T: Scalar>(
    force: &EdgeField<T>,
    iso: &EdgeField<T>,
) -> Result<(EdgeField<T>, EdgeField<T>)> {
    let half = T::lit(0.5);
    let sym = force.zip_with(iso, |f, g| half * (f + g))?;
    let asym = force.zip_with(iso, |f, g| half * (f - g))?;
    Ok((sym, asym))
}

/// The two Bregman terms splitting the entropy production.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySplit<T> {
    pub e: T,
    /// `D[j‖−j_iso]`
    pub term1: T,
    /// `D[j‖j_iso]`
    pub term2: T,
    /// `|e − term1 − term2|`
    pub defect: T,
    /// `|Ψ*(F_iso) − Ψ*(F)|`
    pub level_set_defect: T,
}

/// Decompose `e = D[j‖−j_iso] + D[j‖j_iso]` for an iso-dissipation force.
pub fn entropy_decomposition<T: Scalar>(
    spec: &ChainSpec<T>,
    rho: &Density<T>,
    iso: &EdgeField<T>,
) -> Result<EntropySplit<T>> {
    let (mob, force) = mobility_force(spec, rho)?;
    let j = flux(&mob, &force)?;
    let level_set_defect = (psi_star(&mob, iso)? - psi_star(&mob, &force)?).abs();
    if level_set_defect > T::tol(1e-8) {
        return Err(Error::NotOnLevelSet {
            defect: level_set_defect.to_f64_lossy(),
        });
    }
    let j_iso = flux(&mob, iso)?;
    let neg_j_iso = j_iso.map(|v| -v);
    let e = entropy_production(&j, &force)?;
    let term1 = bregman(&mob, &j, &neg_j_iso)?;
    let term2 = bregman(&mob, &j, &j_iso)?;
    Ok(EntropySplit {
        e,
        term1,
        term2,
        defect: (e - term1 - term2).abs(),
        level_set_defect,
    })
}
