use std::collections::BTreeMap;

use num::ToPrimitive;

use super::atom::Atom;
use super::expr::Expr;
use super::poly::Poly;
use crate::error::{CoreError, Result};

/// Floating-point evaluation under a total assignment of atoms.
///
/// Every atom occurring in `e` (numerator and denominator alike) must have an
/// entry in `values`; derivative and function atoms are opaque here, so the
/// caller supplies their values directly.
pub fn eval_numeric(e: &Expr, values: &BTreeMap<Atom, f64>) -> Result<f64> {
    let missing: Vec<String> = e
        .atoms()
        .iter()
        .filter(|a| !values.contains_key(a))
        .map(|a| a.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CoreError::MissingAssignment(missing));
    }
    let den = eval_poly(e.den(), values);
    if den.abs() < 1e-12 {
        return Err(CoreError::NumericSingularity);
    }
    Ok(eval_poly(e.num(), values) / den)
}

fn eval_poly(p: &Poly, values: &BTreeMap<Atom, f64>) -> f64 {
    p.terms()
        .iter()
        .map(|(m, c)| {
            let coeff = c.to_f64().unwrap_or(f64::NAN);
            m.factors().iter().fold(coeff, |acc, (a, e)| {
                acc * values[a].powi(*e as i32)
            })
        })
        .sum()
}
