use num::BigRational;

use crate::error::Result;

use super::atom::Atom;
use super::expr::Expr;

/// Unnormalized expression tree, the construction-side API. `normalize`
/// folds a tree into the canonical `Expr` form; it is idempotent in the sense
/// that a tree rebuilt from an already canonical expression normalizes to the
/// same value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprTree {
    Rational(BigRational),
    Atom(Atom),
    Sum(Vec<ExprTree>),
    Product(Vec<ExprTree>),
    Pow(Box<ExprTree>, i32),
    Quotient(Box<ExprTree>, Box<ExprTree>),
}

impl ExprTree {
    pub fn int(n: i64) -> Self {
        ExprTree::Rational(BigRational::from_integer(n.into()))
    }

    pub fn atom(a: Atom) -> Self {
        ExprTree::Atom(a)
    }

    pub fn neg(self) -> Self {
        ExprTree::Product(vec![ExprTree::int(-1), self])
    }

    pub fn normalize(&self) -> Result<Expr> {
        match self {
            ExprTree::Rational(c) => Ok(Expr::constant(c.clone())),
            ExprTree::Atom(a) => Ok(Expr::from_atom(a.clone())),
            ExprTree::Sum(parts) => {
                let mut acc = Expr::zero();
                for p in parts {
                    acc = &acc + &p.normalize()?;
                }
                Ok(acc)
            }
            ExprTree::Product(parts) => {
                let mut acc = Expr::one();
                for p in parts {
                    acc = &acc * &p.normalize()?;
                }
                Ok(acc)
            }
            ExprTree::Pow(base, k) => base.normalize()?.pow(*k),
            ExprTree::Quotient(a, b) => a.normalize()?.try_div(&b.normalize()?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::CoreError;
    use crate::expr::{MultiIndex, Sym};

    fn u() -> ExprTree {
        ExprTree::atom(Atom::dep("u"))
    }

    fn ux() -> ExprTree {
        ExprTree::atom(Atom::jet("u", MultiIndex::single(Sym::new("x"))))
    }

    fn x() -> ExprTree {
        ExprTree::atom(Atom::indep("x"))
    }

    #[test]
    fn normalize_examples() {
        // u*1 + 0 -> u
        let t = ExprTree::Sum(vec![
            ExprTree::Product(vec![u(), ExprTree::int(1)]),
            ExprTree::int(0),
        ]);
        assert_eq!(t.normalize().unwrap(), Expr::from_atom(Atom::dep("u")));

        // (u + u_x) - (u_x + u) -> 0
        let t = ExprTree::Sum(vec![
            ExprTree::Sum(vec![u(), ux()]),
            ExprTree::Sum(vec![ux(), u()]).neg(),
        ]);
        assert!(t.normalize().unwrap().is_zero());

        // 2x^2*x - x^3 -> x^3
        let t = ExprTree::Sum(vec![
            ExprTree::Product(vec![ExprTree::int(2), ExprTree::Pow(Box::new(x()), 2), x()]),
            ExprTree::Pow(Box::new(x()), 3).neg(),
        ]);
        let x3 = Expr::from_atom(Atom::indep("x")).pow(3).unwrap();
        assert_eq!(t.normalize().unwrap(), x3);
    }

    #[test]
    fn normalize_is_idempotent_via_rebuild() {
        let t = ExprTree::Quotient(
            Box::new(ExprTree::Sum(vec![u(), ExprTree::Product(vec![x(), ux()])])),
            Box::new(ExprTree::Pow(Box::new(u()), 2)),
        );
        let once = t.normalize().unwrap();
        // rebuild through arithmetic: (num/den) assembled again
        let again = &(&once * &Expr::one()) + &Expr::zero();
        assert_eq!(once, again);
    }

    #[test]
    fn division_by_normalized_zero() {
        // u / (u - u) must report the zero denominator
        let t = ExprTree::Quotient(
            Box::new(u()),
            Box::new(ExprTree::Sum(vec![u(), u().neg()])),
        );
        assert_eq!(t.normalize(), Err(CoreError::ZeroDenominator));
    }
}
