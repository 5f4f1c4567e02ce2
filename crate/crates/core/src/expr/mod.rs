//! Exact symbolic expressions: rational functions whose variables are jet
//! coordinates, independent variables, and derivatives of arbitrary functions.

mod atom;
mod display;
mod eval;
#[allow(clippy::module_inception)]
mod expr;
mod monomial;
mod poly;
mod sym;
mod tree;

pub use atom::{Atom, MultiIndex};
pub use eval::eval_numeric;
pub(crate) use expr::clear_denominators;
pub use expr::{normalize_scale, Expr};
pub use monomial::Monomial;
pub use poly::Poly;
pub use sym::Sym;
pub use tree::ExprTree;
