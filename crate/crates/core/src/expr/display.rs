use std::fmt;

use num::{BigRational, One, Signed};

use super::atom::Atom;
use super::expr::Expr;
use super::monomial::Monomial;
use super::poly::Poly;

// The printed syntax round-trips through the model-file expression grammar:
// jets as u_xx, single-argument function symbols as f'', multi-argument ones
// as phi_tx, explicit '*', integer '^' exponents.

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Indep(s) => write!(f, "{s}"),
            Atom::Jet { dep, index } => {
                if index.is_empty() {
                    write!(f, "{dep}")
                } else {
                    write!(f, "{dep}_{index}")
                }
            }
            Atom::Func { name, args, index } => {
                if index.is_empty() {
                    write!(f, "{name}")
                } else if args.len() == 1 {
                    write!(f, "{name}{}", "'".repeat(index.order()))
                } else {
                    write!(f, "{name}_{index}")
                }
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (a, e) in self.factors() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{e}")?;
            }
        }
        Ok(())
    }
}

fn fmt_coeff(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if m.is_one() {
                fmt_coeff(f, &mag)?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                fmt_coeff(f, &mag)?;
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den().is_one() {
            return write!(f, "{}", self.num());
        }
        let num = self.num();
        if num.num_terms() > 1 {
            write!(f, "({num})")?;
        } else {
            write!(f, "{num}")?;
        }
        write!(f, "/")?;
        let den = self.den();
        // a single coefficient-free power needs no parentheses on the right
        // of '/'; anything else does
        let simple = den.num_terms() == 1
            && den.terms()[0].1.is_one()
            && den.terms()[0].0.factors().len() == 1;
        if simple {
            write!(f, "{den}")
        } else {
            write!(f, "({den})")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{MultiIndex, Sym};

    fn e(a: Atom) -> Expr {
        Expr::from_atom(a)
    }

    #[test]
    fn atom_forms() {
        assert_eq!(Atom::indep("x").to_string(), "x");
        assert_eq!(Atom::dep("u").to_string(), "u");
        let uxx = Atom::jet("u", MultiIndex::new(vec![Sym::new("x"), Sym::new("x")]));
        assert_eq!(uxx.to_string(), "u_xx");
        let utx = Atom::jet("u", MultiIndex::new(vec![Sym::new("x"), Sym::new("t")]));
        assert_eq!(utx.to_string(), "u_tx");
        let f2 = Atom::func("f", vec![Sym::new("t")], MultiIndex::new(vec![Sym::new("t"); 2]));
        assert_eq!(f2.to_string(), "f''");
        let phi = Atom::func(
            "phi",
            vec![Sym::new("t"), Sym::new("x")],
            MultiIndex::new(vec![Sym::new("t"), Sym::new("x")]),
        );
        assert_eq!(phi.to_string(), "phi_tx");
    }

    #[test]
    fn poly_and_expr_forms() {
        let u = e(Atom::dep("u"));
        let x = e(Atom::indep("x"));
        let sum = &(&Expr::rat(-1, 2) * &(&u * &u)) - &x;
        assert_eq!(sum.to_string(), "-x - 1/2*u^2");
        let quot = x.try_div(&(&u * &u)).unwrap();
        assert_eq!(quot.to_string(), "x/u^2");
        let messy = (&x + &Expr::one()).try_div(&(&u * &(&u + &x))).unwrap();
        assert_eq!(messy.to_string(), "(x + 1)/(x*u + u^2)");
        assert_eq!(Expr::zero().to_string(), "0");
    }
}
