//! Symbolic machinery for systems of differential equations: jet-space
//! calculus, formal Lagrangians and adjoint systems, self-adjointness
//! classification, and construction and verification of conservation laws
//! from symmetries.

pub mod adjoint;
pub mod conslaw;
pub mod error;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod manifold;
pub mod numeric;
pub mod testkit;
pub mod system;

pub use error::{CoreError, Result};
