//! Operator-valued conditional probability for finite-dimensional systems.
//!
//! The central object is a positive operator labeled by *regions* — quantum
//! factors or classical factors with a preferred basis. Joints, marginals,
//! conditionals, Bayesian inversion, and belief propagation are all expressed
//! through a non-commutative product `M ⋆ N = N^{1/2} M N^{1/2}`, so the same
//! API covers density operators, classical probability distributions, and
//! hybrids of the two.
//!
//! On top of the operator layer sit:
//! - channels and measurement models as conditional operators,
//! - state compatibility checks with constructive witnesses,
//! - entropic measures and conditional independence,
//! - sufficient statistics, state improvement, and pooling rules,
//! - builders for common preparation/measurement scenarios,
//! - a JSON file format, seeded random generators, and self-check suites.

pub mod error;
pub mod region;
pub mod operator;
pub mod conditional;
pub mod hybrid;
pub mod compat;
pub mod entropy;
pub mod suffstat;
pub mod improve;
pub mod pool;
pub mod scenario;
pub mod random;
pub mod suites;
pub mod io;
pub mod linalg;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerance;
