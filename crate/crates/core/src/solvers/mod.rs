//! Numerical kernels shared by the analysis modules.

pub mod linalg;
pub mod newton;
pub mod ode;
pub mod oracle;
pub mod special;

pub use linalg::{solve, Lu, Matrix};
pub use newton::{newton_minimize, FnObjective, NewtonConfig, NewtonResult, SmoothObjective};
pub use ode::rk4_step;
pub use oracle::{bisect, golden_section, legendre_oracle, GridSpec, OracleValue};
pub use special::{arsinh, cosh_m1};
