//! Formal Lagrangians, adjoint systems, and self-adjointness classification.
//!
//! The adjoint of F = 0 is obtained variationally: extend the space with one
//! adjoint dependent per equation, form L = sum_beta v^beta F_beta, and take
//! delta L / delta u^alpha. A system is self-adjoint under v := phi(x, u)
//! when every substituted adjoint equation vanishes on the solution manifold
//! of the original system; the certificate coefficients are reported so the
//! caller can see how each adjoint equation decomposes over the originals.

use std::collections::BTreeMap;

use num::{BigRational, Zero};

use crate::error::{CoreError, Result};
use crate::expr::{clear_denominators, Atom, Expr, MultiIndex, Sym};
use crate::jet::{d_multi, multi_indices, variational_derivative, JetSpace};
use crate::linalg::{coefficient_matrix, QMatrix};
use crate::manifold::{reduce, solve_for_leading, Certificate};
use crate::system::{DiffSystem, SubClass, Substitution};

/// Largest coefficient degree accepted for the affine ansatz before the
/// search space is considered unbounded.
pub const AFFINE_DEGREE_CAP: u32 = 12;

/// Adjoint equations mix original and adjoint coordinates, so they live on
/// the doubled space and are kept apart from `DiffSystem`, whose equations
/// may not mention the v-block.
#[derive(Debug, Clone)]
pub struct AdjointSystem {
    space: JetSpace,
    equations: Vec<(Sym, Expr)>,
}

impl AdjointSystem {
    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    /// One (source equation name, adjoint expression) pair per equation.
    pub fn equations(&self) -> &[(Sym, Expr)] {
        &self.equations
    }
}

/// L = sum_beta v^beta F_beta.
pub fn formal_lagrangian(sys: &DiffSystem) -> Expr {
    sys.equations()
        .iter()
        .enumerate()
        .map(|(beta, eq)| &Expr::from_atom(Atom::dep(sys.space().v_of(beta).clone())) * eq.expr())
        .sum()
}

/// Variational derivatives of the formal Lagrangian, oriented so that the
/// leading derivative of each source equation reappears with its original
/// sign: equations whose lead has odd order pick up a minus from integration
/// by parts, which is undone here.
pub fn adjoint_system(sys: &DiffSystem) -> Result<AdjointSystem> {
    let space = sys.space();
    let l = formal_lagrangian(sys);
    let mut equations = Vec::with_capacity(sys.m());
    for (alpha, eq) in sys.equations().iter().enumerate() {
        let raw = variational_derivative(space, &l, &space.deps_u()[alpha])?;
        let fs = if eq.lead().order() % 2 == 1 { -&raw } else { raw };
        equations.push((eq.name().clone(), fs));
    }
    Ok(AdjointSystem { space: space.clone(), equations })
}

fn ensure_linear_homogeneous(space: &JetSpace, f: &Expr) -> Result<()> {
    let is_u_jet = |a: &Atom| matches!(a, Atom::Jet { dep, .. } if space.is_dep_u(dep));
    if f.den().atoms().iter().any(is_u_jet) {
        return Err(CoreError::RequiresLinearity);
    }
    for (m, _) in f.num().terms() {
        let deg: u32 = m
            .factors()
            .iter()
            .filter(|(a, _)| is_u_jet(a))
            .map(|(_, k)| *k)
            .sum();
        if deg != 1 {
            return Err(CoreError::RequiresLinearity);
        }
    }
    Ok(())
}

/// Divergence identity test for linear operators: with the unoriented
/// variational adjoint, sum_alpha v^alpha F_alpha - sum_alpha u^alpha
/// F*_alpha must be a total divergence, which holds iff all its variational
/// derivatives vanish. Only defined for systems homogeneous linear in the
/// u-block jets.
pub fn classical_adjoint_check(sys: &DiffSystem) -> Result<bool> {
    let space = sys.space();
    for eq in sys.equations() {
        ensure_linear_homogeneous(space, eq.expr())?;
    }
    let l = formal_lagrangian(sys);
    let mut e = l.clone();
    for dep in space.deps_u() {
        let raw = variational_derivative(space, &l, dep)?;
        e = &e - &(&Expr::from_atom(Atom::dep(dep.clone())) * &raw);
    }
    for w in space.deps_all() {
        if !variational_derivative(space, &e, w)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Replacement map sending every v-block jet occurring in `exprs` to the
/// corresponding total derivative of the substitution component.
pub(crate) fn v_elimination_map<'a>(
    space: &JetSpace,
    sub: &Substitution,
    exprs: impl Iterator<Item = &'a Expr>,
) -> Result<BTreeMap<Atom, Expr>> {
    let mut map = BTreeMap::new();
    for e in exprs {
        for a in e.atoms() {
            if map.contains_key(&a) {
                continue;
            }
            if let Atom::Jet { dep, index } = &a {
                if let Some(alpha) = space.deps_v().iter().position(|v| v == dep) {
                    let val = d_multi(space, sub.component(alpha), index)?;
                    map.insert(a, val);
                }
            }
        }
    }
    Ok(map)
}

/// Outcome of testing v := phi(x, u) against the adjoint system on the
/// solution manifold of the source system.
#[derive(Debug, Clone)]
pub struct SelfAdjointnessReport {
    pub verdict: bool,
    pub class: SubClass,
    /// `lambda[alpha][beta]`: on-manifold coefficient of equation beta in
    /// the substituted adjoint equation alpha.
    pub lambda: Vec<Vec<Expr>>,
    /// Coefficients attached to proper derivatives of the equations, keyed
    /// by (equation name, derivative index), normalized on the manifold.
    pub prolonged: Vec<Certificate>,
    /// Normal form of each substituted adjoint equation; all zero iff the
    /// verdict holds.
    pub residual: Vec<Expr>,
    /// True where the substituted equation vanished identically, before any
    /// use of the equations.
    pub vanishes: Vec<bool>,
}

pub fn check_substitution(sys: &DiffSystem, sub: &Substitution) -> Result<SelfAdjointnessReport> {
    let adj = adjoint_system(sys)?;
    let ranking = solve_for_leading(sys)?;
    let vmap = v_elimination_map(sys.space(), sub, adj.equations().iter().map(|(_, e)| e))?;
    let names: Vec<Sym> = sys.equations().iter().map(|eq| eq.name().clone()).collect();
    let mut lambda = Vec::with_capacity(names.len());
    let mut prolonged = Vec::with_capacity(names.len());
    let mut residual = Vec::with_capacity(names.len());
    let mut vanishes = Vec::with_capacity(names.len());
    for (_, fs) in adj.equations() {
        let substituted = fs.substitute(&vmap)?;
        vanishes.push(substituted.is_zero());
        let (nf, cert) = reduce(&substituted, &ranking)?;
        let mut row = Vec::with_capacity(names.len());
        for n in &names {
            row.push(match cert.get(&(n.clone(), MultiIndex::empty())) {
                Some(q) => reduce(q, &ranking)?.0,
                None => Expr::zero(),
            });
        }
        let mut extra = Certificate::new();
        for ((n, k), q) in &cert {
            if !k.is_empty() {
                extra.insert((n.clone(), k.clone()), reduce(q, &ranking)?.0);
            }
        }
        lambda.push(row);
        prolonged.push(extra);
        residual.push(nf);
    }
    let verdict = residual.iter().all(Expr::is_zero);
    Ok(SelfAdjointnessReport {
        verdict,
        class: sub.class(),
        lambda,
        prolonged,
        residual,
        vanishes,
    })
}

/// Search template for `find_substitution`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzSpec {
    /// v^alpha = (u^alpha)^k with one shared integer exponent k.
    Power,
    /// v^alpha = a_alpha(x) + b_alpha(x) u^alpha with polynomial
    /// coefficients in the independent variables of bounded total degree.
    Affine(u32),
    /// Constant components.
    Const,
}

/// First substitution in a fixed template order that makes the system
/// self-adjoint, or None when the template is exhausted.
pub fn find_substitution(sys: &DiffSystem, ansatz: AnsatzSpec) -> Result<Option<Substitution>> {
    match ansatz {
        AnsatzSpec::Power => find_power(sys),
        AnsatzSpec::Const => find_linear(sys, 0, false),
        AnsatzSpec::Affine(d) => {
            if d > AFFINE_DEGREE_CAP {
                return Err(CoreError::UnboundedAnsatz(d));
            }
            find_linear(sys, d, true)
        }
    }
}

fn find_power(sys: &DiffSystem) -> Result<Option<Substitution>> {
    for k in [1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6] {
        let comps: Result<Vec<Expr>> = sys
            .space()
            .deps_u()
            .iter()
            .map(|d| Expr::from_atom(Atom::dep(d.clone())).pow(k))
            .collect();
        let sub = Substitution::new(sys.space(), comps?)?;
        if check_substitution(sys, &sub)?.verdict {
            return Ok(Some(sub));
        }
    }
    Ok(None)
}

/// Monomials in the independent variables with total degree at most `degree`.
fn x_monomials(space: &JetSpace, degree: u32) -> Vec<Expr> {
    multi_indices(space.indeps(), degree as usize)
        .iter()
        .map(|j| {
            j.counts()
                .into_iter()
                .map(|(s, c)| {
                    Expr::from_atom(Atom::indep(s)).pow(c as i32).expect("positive power")
                })
                .fold(Expr::one(), |acc, e| &acc * &e)
        })
        .collect()
}

/// Linear-ansatz search. The adjoint system is linear homogeneous in the
/// v-block jets and reduction to normal form is linear, so the substituted
/// normal form of any candidate sum is the matching combination of the
/// per-basis-function responses; self-adjoint candidates are exactly the
/// nullspace of the response coefficients.
fn find_linear(sys: &DiffSystem, degree: u32, with_u: bool) -> Result<Option<Substitution>> {
    let space = sys.space();
    let adj = adjoint_system(sys)?;
    let ranking = solve_for_leading(sys)?;
    let m = sys.m();

    let monos = x_monomials(space, degree);
    let mut basis: Vec<(usize, Expr)> = Vec::new();
    for alpha in 0..m {
        for mono in &monos {
            basis.push((alpha, mono.clone()));
        }
        if with_u {
            let u = Expr::from_atom(Atom::dep(space.deps_u()[alpha].clone()));
            for mono in &monos {
                basis.push((alpha, mono * &u));
            }
        }
    }

    let mut responses: Vec<Vec<Expr>> = vec![Vec::with_capacity(basis.len()); m];
    for (alpha, psi) in &basis {
        for (gamma, (_, fs)) in adj.equations().iter().enumerate() {
            let mut vmap = BTreeMap::new();
            for a in fs.atoms() {
                if let Atom::Jet { dep, index } = &a {
                    if let Some(beta) = space.deps_v().iter().position(|v| v == dep) {
                        let val = if beta == *alpha {
                            d_multi(space, psi, index)?
                        } else {
                            Expr::zero()
                        };
                        vmap.insert(a.clone(), val);
                    }
                }
            }
            let (nf, _) = reduce(&fs.substitute(&vmap)?, &ranking)?;
            responses[gamma].push(nf);
        }
    }

    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for resp in &responses {
        let cleared = clear_denominators(resp);
        let mat = coefficient_matrix(&cleared);
        for r in 0..mat.rows() {
            rows.push((0..mat.cols()).map(|c| mat.get(r, c).clone()).collect());
        }
    }
    let matrix = if rows.is_empty() {
        QMatrix::zeros(1, basis.len())
    } else {
        QMatrix::from_rows(rows)
    };

    for coeffs in matrix.nullspace() {
        let mut comps = vec![Expr::zero(); m];
        for ((alpha, psi), c) in basis.iter().zip(&coeffs) {
            if !c.is_zero() {
                comps[*alpha] = &comps[*alpha] + &psi.scale(c);
            }
        }
        let sub = Substitution::new(space, comps)?;
        if check_substitution(sys, &sub)?.verdict {
            return Ok(Some(sub));
        }
    }
    Ok(None)
}

/// Rewrite a scalar equation as (phi / u) F = 0. When phi solves the adjoint
/// problem this makes the equation strictly self-adjoint, at the price of a
/// rational multiplier.
pub fn multiplier_form(sys: &DiffSystem, sub: &Substitution) -> Result<DiffSystem> {
    if sys.m() != 1 {
        return Err(CoreError::ScalarOnly);
    }
    let space = sys.space().clone();
    let u = Expr::from_atom(Atom::dep(space.deps_u()[0].clone()));
    let mu = sub.component(0).try_div_reduced(&u)?;
    if mu.is_zero() {
        return Err(CoreError::ZeroMultiplier);
    }
    let eq = &sys.equations()[0];
    let scaled = &mu * eq.expr();
    DiffSystem::new(space, vec![(eq.name().clone(), scaled, Some(eq.lead().clone()))])
}
