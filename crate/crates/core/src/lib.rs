//! Thermodynamics and large deviations of finite Markov jump processes.
//!
//! Starting from a rate matrix, the crate computes edge mobilities, forces and
//! fluxes, the dissipation potentials `Ψ` and `Ψ*`, entropy production and
//! its Bregman decompositions, the time-reversed chain and its force, the
//! Hamiltonian/Lagrangian pair of the large-deviation rate function, and the
//! Donsker–Varadhan functional. A periodic finite-volume grid connects the
//! discrete machinery to drift–diffusion, and an exact stochastic simulator
//! provides sample-based cross-checks.
//!
//! All numerics are generic over [`Scalar`] (`f64` or `f32`); the aliases
//! below fix the precision.
//!
//! ```
//! use nonrev::{stationary, mobility_force, flux, entropy_production, ChainSpec64};
//!
//! // three-state ring, clockwise rate 2, counter-clockwise rate 1
//! let spec = ChainSpec64::new(3, [
//!     (0, 1, 2.0), (1, 2, 2.0), (2, 0, 2.0),
//!     (1, 0, 1.0), (2, 1, 1.0), (0, 2, 1.0),
//! ]).unwrap();
//! let pi = stationary(&spec).unwrap();
//! let (a, f) = mobility_force(&spec, &pi).unwrap();
//! let j = flux(&a, &f).unwrap();
//! let e = entropy_production(&j, &f).unwrap();
//! assert!((e - 2.0 * 2f64.ln()).abs() < 1e-12);
//! ```

// `!(x > 0)` is used on purpose throughout: it also rejects NaN. Index
// loops are kept where several arrays share the index.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chain;
pub mod duality;
pub mod error;
pub mod fokker_planck;
pub mod force_flux;
pub mod gillespie;
pub mod io;
pub mod scalar;
pub mod solvers;
pub mod variational;

pub use chain::{evolve, stationary, validate, ChainSpec, Density, GeneratorMatrix, ValidationReport};
pub use duality::{adjoint_chain, canonical_split, dual_force, representation, AdjointRepresentation};
pub use error::{Error, Result};
pub use force_flux::{
    bregman, entropy_decomposition, entropy_production, flux, force_split, iso_force_family,
    mobility_force, pairing, psi, psi_star, DissipationPair, EdgeField, EdgeSet, EntropySplit,
    IsoSelector, Mobility,
};
pub use scalar::Scalar;

pub type ChainSpec64 = ChainSpec<f64>;
pub type ChainSpec32 = ChainSpec<f32>;
pub type Density64 = Density<f64>;
pub type Density32 = Density<f32>;
pub type EdgeField64 = EdgeField<f64>;
pub type EdgeField32 = EdgeField<f32>;
pub type GridModel64 = fokker_planck::GridModel<f64>;
pub type GridModel32 = fokker_planck::GridModel<f32>;
