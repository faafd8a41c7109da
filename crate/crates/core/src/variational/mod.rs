//! Hamiltonian and Lagrangian structure of the jump-process large deviations.
//!
//! Everything here is evaluated at a fixed density `ρ`, which is baked into
//! each Hamiltonian handle when it is built. The Lagrangian is always the
//! numerical Legendre transform of the Hamiltonian; closed forms are only
//! ever compared against it.

pub mod dv;
pub mod hamiltonian;
pub mod legendre;
pub mod split;

pub use dv::{donsker_varadhan, dv_u_form, DvReport, UFormValue};
pub use hamiltonian::{
    hamiltonian_from_generator, hamiltonian_from_psi, recover_psi_star, ConstantHamiltonian,
    DynHamiltonian, EdgeHamiltonian, FnHamiltonian, Gauge, Hamiltonian, HamiltonianKind,
    LinearHamiltonian, PsiStarFromHamiltonian, StateHamiltonian, SumHamiltonian,
};
pub use legendre::{
    convexity_violation, legendre, legendre_with, min_hamiltonian, reversibility_defect,
    LagrangianValue, MinResult, ProbeConfig,
};
pub use split::{
    constant_part_value, decompose, edge_lagrangian, linear_part_value, pairing_coefficient,
    psi2_star, reversible_value, ConstantPartValue, EdgeLagrangian, LinearPartReport,
    ReversibleValue, SplitPart, SplitReport,
};
