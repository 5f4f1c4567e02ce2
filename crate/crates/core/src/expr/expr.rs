use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, One};

use crate::error::{CoreError, Result};

use super::atom::Atom;
use super::poly::Poly;

/// Canonical rational function num/den.
///
/// Invariants: den is nonzero, primitive (coprime integer coefficients,
/// positive leading coefficient), and shares no monomial factor with num;
/// zero is represented as 0/1 and a constant denominator is always folded
/// away. Common polynomial factors beyond monomials are deliberately NOT
/// cancelled: leaving them in place is what makes normalization confluent
/// under re-association without a full multivariate gcd. Equality of the
/// represented functions is decided by `math_eq` (cross multiplication), not
/// by `==`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Arc<Poly>,
    den: Arc<Poly>,
}

impl Expr {
    pub fn make(num: Poly, den: Poly) -> Result<Expr> {
        if den.is_zero() {
            return Err(CoreError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Expr { num: Arc::new(Poly::zero()), den: Arc::new(Poly::one()) });
        }
        let g = num.monomial_content().gcd(&den.monomial_content());
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_monomial(&g), den.div_monomial(&g))
        };
        let c = den.signed_content();
        if !c.is_one() {
            den = den.scale(&c.recip());
            num = num.scale(&c.recip());
        }
        Ok(Expr { num: Arc::new(num), den: Arc::new(den) })
    }

    pub(crate) fn from_poly(p: Poly) -> Expr {
        Expr { num: Arc::new(p), den: Arc::new(Poly::one()) }
    }

    pub fn zero() -> Expr {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::from_poly(Poly::int(n))
    }

    /// Exact rational constant p/q; panics if q = 0.
    pub fn rat(p: i64, q: i64) -> Expr {
        assert!(q != 0, "rational constant with zero denominator");
        Expr::constant(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn constant(c: BigRational) -> Expr {
        Expr::from_poly(Poly::constant(c))
    }

    pub fn from_atom(a: Atom) -> Expr {
        Expr::from_poly(Poly::from_atom(a))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = self.num.atoms();
        out.extend(self.den.atoms());
        out
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.num.contains_atom(a) || self.den.contains_atom(a)
    }

    /// Mathematical equality of the represented rational functions.
    pub fn math_eq(&self, other: &Expr) -> bool {
        if self == other {
            return true;
        }
        (&*self.num * &*other.den) == (&*other.num * &*self.den)
    }

    /// Some(c) with self = c * other for a nonzero rational constant c.
    /// Two zero expressions are proportional with c = 1.
    pub fn equal_mod_nonzero_constant(&self, other: &Expr) -> Option<BigRational> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Some(BigRational::one()),
            (true, false) | (false, true) => return None,
            _ => {}
        }
        let p = &*self.num * &*other.den;
        let q = &*other.num * &*self.den;
        let c = p.leading().map(|(_, c)| c.clone())? / q.leading().map(|(_, c)| c.clone())?;
        if p == q.scale(&c) {
            Some(c)
        } else {
            None
        }
    }

    pub fn recip(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(CoreError::ZeroDenominator);
        }
        Expr::make((*self.den).clone(), (*self.num).clone())
    }

    pub fn try_div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(CoreError::ZeroDenominator);
        }
        Expr::make(&*self.num * &*other.den, &*self.den * &*other.num)
    }

    /// Division that additionally cancels a polynomial cofactor when the
    /// quotient happens to be exact. Used where divisibility is expected
    /// (rewrite certificates, multipliers) to keep reported coefficients in
    /// lowest terms; not part of canonical construction.
    pub fn try_div_reduced(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(CoreError::ZeroDenominator);
        }
        let num = &*self.num * &*other.den;
        let den = &*self.den * &*other.num;
        if let Some(q) = num.try_div_exact(&den) {
            return Ok(Expr::from_poly(q));
        }
        if let Some(q) = den.try_div_exact(&num) {
            // self/other = 1/q
            return Expr::make(Poly::one(), q);
        }
        Expr::make(num, den)
    }

    pub fn pow(&self, k: i32) -> Result<Expr> {
        if k == 0 {
            return Ok(Expr::one());
        }
        let mag = k.unsigned_abs();
        let num = self.num.pow(mag);
        let den = self.den.pow(mag);
        if k > 0 {
            Expr::make(num, den)
        } else if num.is_zero() {
            Err(CoreError::ZeroDenominator)
        } else {
            Expr::make(den, num)
        }
    }

    /// Formal partial derivative with respect to one atom (quotient rule).
    pub fn partial(&self, a: &Atom) -> Expr {
        if self.den.is_one() {
            return Expr::from_poly(self.num.partial(a));
        }
        let dn = self.num.partial(a);
        let dd = self.den.partial(a);
        let num = &(&dn * &*self.den) - &(&*self.num * &dd);
        let den = &*self.den * &*self.den;
        Expr::make(num, den).expect("denominator square is nonzero")
    }

    /// Simultaneous replacement of atoms. Fails when a substituted value makes
    /// a denominator vanish identically.
    pub fn substitute(&self, map: &BTreeMap<Atom, Expr>) -> Result<Expr> {
        if map.is_empty() || !self.atoms().iter().any(|a| map.contains_key(a)) {
            return Ok(self.clone());
        }
        let num = substitute_poly(&self.num, map)?;
        let den = substitute_poly(&self.den, map)?;
        num.try_div(&den)
    }

    pub fn scale(&self, c: &BigRational) -> Expr {
        Expr { num: Arc::new(self.num.scale(c)), den: self.den.clone() }
    }

    /// Total size (term count of num plus den), a rough complexity measure.
    pub fn size(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }
}

fn substitute_poly(p: &Poly, map: &BTreeMap<Atom, Expr>) -> Result<Expr> {
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut term = Expr::constant(c.clone());
        for (a, e) in m.factors() {
            let base = match map.get(a) {
                Some(repl) => repl.clone(),
                None => Expr::from_atom(a.clone()),
            };
            term = &term * &base.pow(*e as i32)?;
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let (num, den) = if self.den == rhs.den {
            (&*self.num + &*rhs.num, (*self.den).clone())
        } else {
            (
                &(&*self.num * &*rhs.den) + &(&*rhs.num * &*self.den),
                &*self.den * &*rhs.den,
            )
        };
        Expr::make(num, den).expect("nonzero denominators")
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { num: Arc::new(-&*self.num), den: self.den.clone() }
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::make(&*self.num * &*rhs.num, &*self.den * &*rhs.den)
            .expect("nonzero denominators")
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $trait::$method(&self, rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |acc, e| &acc + &e)
    }
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// Multiply a family of expressions by the product of their distinct
/// denominators, yielding polynomials. The common factor is nonzero wherever
/// the originals are defined, so `sum c_k * e_k = 0` iff the returned polys
/// satisfy the same linear relation.
pub(crate) fn clear_denominators(exprs: &[Expr]) -> Vec<Poly> {
    let mut dens: Vec<Poly> = Vec::new();
    for e in exprs {
        if !e.den().is_one() && !dens.contains(e.den()) {
            dens.push(e.den().clone());
        }
    }
    exprs
        .iter()
        .map(|e| {
            let mut p = e.num().clone();
            for d in &dens {
                if d != e.den() {
                    p = &p * d;
                }
            }
            p
        })
        .collect()
}

/// Scale all components so the first nonzero one has a positive integer
/// leading coefficient with content 1; a deterministic representative used
/// when a result is only defined up to a constant.
pub fn normalize_scale(components: &mut [Expr]) {
    let Some(first) = components.iter().find(|e| !e.is_zero()) else {
        return;
    };
    let c = first.num().signed_content();
    if c.is_one() {
        return;
    }
    let inv = c.recip();
    for e in components.iter_mut() {
        *e = e.scale(&inv);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{MultiIndex, Sym};

    fn x() -> Expr {
        Expr::from_atom(Atom::indep("x"))
    }

    fn u() -> Expr {
        Expr::from_atom(Atom::dep("u"))
    }

    fn ux() -> Expr {
        Expr::from_atom(Atom::jet("u", MultiIndex::single(Sym::new("x"))))
    }

    #[test]
    fn identity_elements_fold() {
        let e = &(&u() * &Expr::one()) + &Expr::zero();
        assert_eq!(e, u());
    }

    #[test]
    fn commutative_cancellation() {
        let a = &u() + &ux();
        let b = &ux() + &u();
        assert!((&a - &b).is_zero());
    }

    #[test]
    fn hand_arithmetic_oracle() {
        // 2x^2 * x - x^3 = x^3
        let got = &(&(&Expr::int(2) * &x().pow(2).unwrap()) * &x()) - &x().pow(3).unwrap();
        assert_eq!(got, x().pow(3).unwrap());
    }

    #[test]
    fn negative_powers_route_to_denominator() {
        let e = u().pow(-2).unwrap();
        assert!(e.num().is_one());
        assert_eq!(e.den(), u().pow(2).unwrap().num());
        // u^-2 * u^3 = u by monomial cancellation
        let got = &e * &u().pow(3).unwrap();
        assert_eq!(got, u());
    }

    #[test]
    fn zero_denominator_is_reported() {
        assert_eq!(u().try_div(&Expr::zero()), Err(CoreError::ZeroDenominator));
        assert_eq!(Expr::zero().pow(-1), Err(CoreError::ZeroDenominator));
        let diff = &u() - &u();
        assert_eq!(x().try_div(&diff), Err(CoreError::ZeroDenominator));
    }

    #[test]
    fn proportionality_oracle() {
        // coefficient ratio computed by hand: 6x^3 u = 3 * (2x^3 u)
        let a = &Expr::int(6) * &(&x().pow(3).unwrap() * &u());
        let b = &Expr::int(2) * &(&x().pow(3).unwrap() * &u());
        assert_eq!(
            a.equal_mod_nonzero_constant(&b),
            Some(BigRational::from_integer(3.into()))
        );
        let neg = -&a;
        assert_eq!(
            a.equal_mod_nonzero_constant(&neg),
            Some(BigRational::from_integer((-1).into()))
        );
        // 2u vs u^2: not proportional
        let two_u = &Expr::int(2) * &u();
        assert_eq!(two_u.equal_mod_nonzero_constant(&u().pow(2).unwrap()), None);
        assert_eq!(Expr::zero().equal_mod_nonzero_constant(&u()), None);
    }

    #[test]
    fn proportionality_sees_through_representation() {
        // (x^2-1)/(x+1) and (x-1) differ structurally but are proportional
        let num = &x().pow(2).unwrap() - &Expr::one();
        let den = &x() + &Expr::one();
        let frac = num.try_div(&den).unwrap();
        let reduced = &x() - &Expr::one();
        assert_ne!(frac, reduced);
        assert!(frac.math_eq(&reduced));
        assert_eq!(frac.equal_mod_nonzero_constant(&reduced), Some(BigRational::one()));
    }

    #[test]
    fn substitute_reports_vanishing_denominator() {
        let inv = u().recip().unwrap();
        let mut map = BTreeMap::new();
        map.insert(Atom::dep("u"), Expr::zero());
        assert_eq!(inv.substitute(&map), Err(CoreError::ZeroDenominator));
        map.insert(Atom::dep("u"), x().pow(2).unwrap());
        assert_eq!(inv.substitute(&map).unwrap(), x().pow(-2).unwrap());
    }

    #[test]
    fn partial_uses_quotient_rule() {
        // d/du (x/u) = -x/u^2
        let e = x().try_div(&u()).unwrap();
        let got = e.partial(&Atom::dep("u"));
        let expect = (-&x()).try_div(&u().pow(2).unwrap()).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn exact_division_helper_reduces() {
        // (u_x * (u+x)) / (u+x) -> u_x under try_div_reduced
        let s = &u() + &x();
        let prod = &ux() * &s;
        assert_eq!(prod.try_div_reduced(&s).unwrap(), ux());
        // and 1/q direction: s / (s * u) -> 1/u
        let big = &s * &u();
        assert_eq!(s.try_div_reduced(&big).unwrap(), u().recip().unwrap());
    }
}
