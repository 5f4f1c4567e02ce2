//! Reduction modulo the solution manifold: each equation is solved for a
//! leading derivative, and expressions are rewritten until no leading
//! coordinate or prolongation of one remains. Every rewrite is certified.

use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::error::{CoreError, Result};
use crate::expr::{Atom, Expr, Monomial, MultiIndex, Poly, Sym};
use crate::jet::{apply_generator, Generator, JetSpace};
use crate::system::DiffSystem;

const STEP_CAP: usize = 10_000;

/// One rewrite rule lead → rhs with rhs in normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    name: Sym,
    lead: Atom,
    rhs: Expr,
}

impl Rule {
    pub fn name(&self) -> &Sym {
        &self.name
    }

    pub fn lead(&self) -> &Atom {
        &self.lead
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    /// lead − rhs; zero exactly on the manifold.
    pub fn solved_form(&self) -> Expr {
        Expr::from_atom(self.lead.clone()) - self.rhs.clone()
    }
}

/// Coefficients of a reduction: (rule name, prolongation index K) → q, with
/// input = normal form + Σ q · D_K(lead − rhs).
pub type Certificate = BTreeMap<(Sym, MultiIndex), Expr>;

#[derive(Debug)]
pub struct Ranking {
    space: JetSpace,
    rules: Vec<Rule>,
    cache: Mutex<BTreeMap<(usize, MultiIndex), Expr>>,
}

impl Clone for Ranking {
    fn clone(&self) -> Ranking {
        Ranking {
            space: self.space.clone(),
            rules: self.rules.clone(),
            cache: Mutex::new(BTreeMap::new()),
        }
    }
}

fn atom_key(a: &Atom) -> Option<(&Sym, &MultiIndex)> {
    match a {
        Atom::Jet { dep, index } => Some((dep, index)),
        Atom::Func { name, index, .. } => Some((name, index)),
        Atom::Indep(_) => None,
    }
}

impl Ranking {
    /// Solve each entry (name, F, lead) for its lead and normalize the
    /// right-hand sides against each other. F may be any rational expression;
    /// F = 0 is read through its numerator.
    pub fn build(space: &JetSpace, entries: Vec<(Sym, Expr, Atom)>) -> Result<Ranking> {
        let mut rules = Vec::with_capacity(entries.len());
        for (name, f, lead) in entries {
            if !f.contains_atom(&lead) {
                return Err(CoreError::BadSystem(format!(
                    "equation '{name}' does not contain its lead {lead}"
                )));
            }
            if matches!(lead, Atom::Indep(_)) {
                return Err(CoreError::BadSystem(format!(
                    "lead of '{name}' must be a derivative, not an independent variable"
                )));
            }
            let Some((s, r)) = f.num().split_linear(&lead) else {
                return Err(CoreError::NonlinearLead {
                    equation: name.to_string(),
                    lead: lead.to_string(),
                });
            };
            let rhs = Expr::make(-&r, s)?;
            rules.push(Rule { name, lead, rhs });
        }
        // One rule per dependent or function family keeps matching unambiguous.
        for (i, a) in rules.iter().enumerate() {
            for b in &rules[..i] {
                let same = match (&a.lead, &b.lead) {
                    (Atom::Jet { dep: d1, .. }, Atom::Jet { dep: d2, .. }) => d1 == d2,
                    (Atom::Func { name: n1, .. }, Atom::Func { name: n2, .. }) => n1 == n2,
                    _ => false,
                };
                if same {
                    return Err(CoreError::BadSystem(format!(
                        "equations '{}' and '{}' both rewrite the same variable",
                        b.name, a.name
                    )));
                }
            }
        }
        let mut ranking =
            Ranking { space: space.clone(), rules, cache: Mutex::new(BTreeMap::new()) };
        // Normal forms are reached regardless of the other rules' state, so a
        // single pass leaves every rhs fully reduced; cycles hit the step cap.
        for i in 0..ranking.rules.len() {
            let (nf, _) = reduce(&ranking.rules[i].rhs, &ranking)?;
            ranking.rules[i].rhs = nf;
            ranking.cache.lock().unwrap().clear();
        }
        Ok(ranking)
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule_named(&self, n: &Sym) -> Option<&Rule> {
        self.rules.iter().find(|r| &r.name == n)
    }

    /// Rule applying to `a`, with the prolongation K by which its lead must
    /// be extended: a = D_K(lead).
    pub(crate) fn match_atom(&self, a: &Atom) -> Option<(usize, MultiIndex)> {
        let (name, index) = atom_key(a)?;
        for (i, rule) in self.rules.iter().enumerate() {
            let (rn, ri) = atom_key(&rule.lead).expect("rule leads are never independents");
            if rn == name && std::mem::discriminant(a) == std::mem::discriminant(&rule.lead) {
                if let Some(k) = index.try_minus(ri) {
                    return Some((i, k));
                }
            }
        }
        None
    }

    /// D_K(rhs) with memoization; computed incrementally from shorter prefixes.
    pub(crate) fn prolonged_rhs(&self, rule: usize, k: &MultiIndex) -> Result<Expr> {
        if k.is_empty() {
            return Ok(self.rules[rule].rhs.clone());
        }
        if let Some(hit) = self.cache.lock().unwrap().get(&(rule, k.clone())) {
            return Ok(hit.clone());
        }
        let last = k.parts().last().expect("nonempty").clone();
        let prefix = k.remove_one(&last).expect("last part is present");
        let shorter = self.prolonged_rhs(rule, &prefix)?;
        let full = crate::jet::total_derivative(&self.space, &shorter, &last)?;
        self.cache.lock().unwrap().insert((rule, k.clone()), full.clone());
        Ok(full)
    }
}

pub fn solve_for_leading(sys: &DiffSystem) -> Result<Ranking> {
    let entries = sys
        .equations()
        .iter()
        .map(|e| (e.name().clone(), e.expr().clone(), e.lead().clone()))
        .collect();
    Ranking::build(sys.space(), entries)
}

/// A generator is a symmetry when its prolonged action on every equation
/// vanishes on the solution manifold. The reduced residuals come back with
/// the verdict so a failed check can be diagnosed.
pub fn check_symmetry(sys: &DiffSystem, x: &Generator) -> Result<(bool, Vec<Expr>)> {
    x.validate(sys.space())?;
    let ranking = solve_for_leading(sys)?;
    let mut residuals = Vec::with_capacity(sys.equations().len());
    for eq in sys.equations() {
        let applied = apply_generator(sys.space(), x, eq.expr())?;
        residuals.push(reduce(&applied, &ranking)?.0);
    }
    Ok((residuals.iter().all(|r| r.is_zero()), residuals))
}

/// (p - p at a:=r) / (a - r) in closed form: for p = sum_j c_j a^j this is
/// sum_{j>=1} c_j sum_{i<j} a^i r^(j-1-i). Exact, and free of a - r in any
/// denominator, which division-based quotients cannot guarantee.
fn substitution_quotient(p: &Poly, a: &Atom, r: &Expr) -> Result<Expr> {
    let mut coeffs: BTreeMap<u32, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let j = m.degree_of(a);
        if j == 0 {
            continue;
        }
        let rest = m
            .try_div(&Monomial::from_powers(vec![(a.clone(), j)]))
            .expect("a^j divides its own monomial");
        let slot = coeffs.entry(j).or_insert_with(Poly::zero);
        *slot = &*slot + &Poly::from_monomial(rest, c.clone());
    }
    let a_expr = Expr::from_atom(a.clone());
    let mut out = Expr::zero();
    for (j, c) in coeffs {
        let mut inner = Expr::zero();
        for i in 0..j {
            inner = &inner + &(&a_expr.pow(i as i32)? * &r.pow((j - 1 - i) as i32)?);
        }
        out = &out + &(&Expr::from_poly(c) * &inner);
    }
    Ok(out)
}

/// Rewrite to normal form. The certificate records, per (rule, K), the
/// coefficient of D_K(lead − rhs) in e − normal_form.
pub fn reduce(e: &Expr, r: &Ranking) -> Result<(Expr, Certificate)> {
    let mut cur = e.clone();
    let mut cert: Certificate = BTreeMap::new();
    for _ in 0..STEP_CAP {
        // Rewrite the highest reducible coordinate first.
        let Some((atom, rule, k)) = cur
            .atoms()
            .into_iter()
            .filter_map(|a| r.match_atom(&a).map(|(rule, k)| (a, rule, k)))
            .max_by(|(a, _, _), (b, _, _)| a.order().cmp(&b.order()).then(a.cmp(b)))
        else {
            return Ok((cur, cert));
        };
        let replacement = r.prolonged_rhs(rule, &k)?;
        let mut map = BTreeMap::new();
        map.insert(atom.clone(), replacement.clone());
        let den = Expr::from_poly((*cur.den()).clone());
        let phi_num = Expr::from_poly((*cur.num()).clone()).substitute(&map)?;
        let phi_den = den.substitute(&map)?;
        let next = phi_num.try_div(&phi_den)?;
        // cur − next = q·(atom − replacement) with q assembled from the two
        // synthetic quotients; see substitution_quotient.
        let syn_num = substitution_quotient(cur.num(), &atom, &replacement)?;
        let q = if cur.den().contains_atom(&atom) {
            let syn_den = substitution_quotient(cur.den(), &atom, &replacement)?;
            (&(&syn_num * &phi_den) - &(&phi_num * &syn_den)).try_div(&(&den * &phi_den))?
        } else {
            syn_num.try_div(&den)?
        };
        if !q.is_zero() {
            let key = (r.rules[rule].name.clone(), k);
            let entry = cert.entry(key).or_insert_with(Expr::zero);
            *entry = &*entry + &q;
        }
        cur = next;
    }
    Err(CoreError::ReductionDiverged(STEP_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{d_multi, total_derivative};

    fn sym(s: &str) -> Sym {
        Sym::new(s)
    }

    fn jet(dep: &str, idx: &[&str]) -> Atom {
        Atom::jet(dep, MultiIndex::new(idx.iter().map(Sym::new).collect()))
    }

    fn e(a: Atom) -> Expr {
        Expr::from_atom(a)
    }

    fn kdv() -> (JetSpace, DiffSystem) {
        let sp = JetSpace::new(vec![sym("t"), sym("x")], vec![sym("u")], vec![]).unwrap();
        let f = e(jet("u", &["t"]))
            - e(jet("u", &["x", "x", "x"]))
            - e(Atom::dep("u")) * e(jet("u", &["x"]));
        let sys = DiffSystem::new(sp.clone(), vec![(sym("F"), f, None)]).unwrap();
        (sp, sys)
    }

    fn kp() -> (JetSpace, DiffSystem) {
        let sp = JetSpace::new(
            vec![sym("t"), sym("x"), sym("y")],
            vec![sym("u"), sym("w")],
            vec![],
        )
        .unwrap();
        let f1 = e(jet("u", &["t"]))
            - e(Atom::dep("u")) * e(jet("u", &["x"]))
            - e(jet("u", &["x", "x", "x"]))
            - e(jet("w", &["y"]));
        let f2 = e(jet("w", &["x"])) - e(jet("u", &["y"]));
        let sys =
            DiffSystem::new(sp.clone(), vec![(sym("F1"), f1, None), (sym("F2"), f2, None)])
                .unwrap();
        (sp, sys)
    }

    #[test]
    fn solves_evolution_equations() {
        let (_, sys) = kdv();
        let r = solve_for_leading(&sys).unwrap();
        assert_eq!(r.rules()[0].lead(), &jet("u", &["t"]));
        let want = e(jet("u", &["x", "x", "x"])) + e(Atom::dep("u")) * e(jet("u", &["x"]));
        assert_eq!(r.rules()[0].rhs(), &want);
    }

    #[test]
    fn equation_reduces_to_zero_with_unit_certificate() {
        let (_, sys) = kdv();
        let r = solve_for_leading(&sys).unwrap();
        let (nf, cert) = reduce(sys.equations()[0].expr(), &r).unwrap();
        assert!(nf.is_zero());
        assert_eq!(cert.len(), 1);
        assert_eq!(cert[&(sym("F"), MultiIndex::empty())], Expr::one());
    }

    #[test]
    fn single_step_normal_form() {
        let (_, sys) = kp();
        let r = solve_for_leading(&sys).unwrap();
        let in_e = e(jet("u", &["t"])) - e(Atom::dep("u")) * e(jet("u", &["x"]));
        let (nf, cert) = reduce(&in_e, &r).unwrap();
        let want = e(jet("u", &["x", "x", "x"])) + e(jet("w", &["y"]));
        assert_eq!(nf, want);
        assert_eq!(cert[&(sym("F1"), MultiIndex::empty())], Expr::one());
    }

    #[test]
    fn idempotent_on_normal_forms() {
        let (_, sys) = kp();
        let r = solve_for_leading(&sys).unwrap();
        let nf = reduce(&(e(jet("u", &["t", "x"])) * e(Atom::dep("u"))), &r).unwrap().0;
        let (again, cert) = reduce(&nf, &r).unwrap();
        assert_eq!(again, nf);
        assert!(cert.is_empty());
    }

    #[test]
    fn certificate_identity_holds() {
        // Reconstruct the input from normal form + Σ q · D_K(lead − rhs).
        let (sp, sys) = kp();
        let r = solve_for_leading(&sys).unwrap();
        let input = e(jet("u", &["t", "x"])) * e(Atom::dep("u"))
            + e(jet("w", &["x", "y"])) * e(jet("u", &["t"]))
            + e(Atom::dep("w")).pow(2).unwrap();
        let (nf, cert) = reduce(&input, &r).unwrap();
        let mut rebuilt = nf;
        for ((name, k), q) in &cert {
            let g = r.rule_named(name).unwrap().solved_form();
            rebuilt = rebuilt + q.clone() * d_multi(&sp, &g, k).unwrap();
        }
        assert!(rebuilt.math_eq(&input));
    }

    #[test]
    fn reduction_is_linear() {
        let (_, sys) = kp();
        let r = solve_for_leading(&sys).unwrap();
        let a = e(jet("u", &["t"])) * e(Atom::dep("u"));
        let b = e(jet("w", &["x", "x"]));
        let lhs = reduce(&(Expr::rat(3, 2) * a.clone() + b.clone()), &r).unwrap().0;
        let rhs = Expr::rat(3, 2) * reduce(&a, &r).unwrap().0 + reduce(&b, &r).unwrap().0;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn function_constraints_reduce() {
        // phi_t ↦ −phi_xx propagates through prolongations.
        let sp = JetSpace::new(
            vec![sym("t"), sym("x")],
            vec![sym("u")],
            vec![(sym("phi"), vec![sym("t"), sym("x")])],
        )
        .unwrap();
        let phi = |idx: &[&str]| {
            Atom::func(
                "phi",
                vec![sym("t"), sym("x")],
                MultiIndex::new(idx.iter().map(Sym::new).collect()),
            )
        };
        let c = e(phi(&["t"])) + e(phi(&["x", "x"]));
        let r = Ranking::build(&sp, vec![(sym("C"), c, phi(&["t"]))]).unwrap();
        let (nf, _) = reduce(&e(phi(&["t", "t"])), &r).unwrap();
        assert_eq!(nf, e(phi(&["x", "x", "x", "x"])));
    }

    #[test]
    fn rational_equations_reduce_through_numerators() {
        // (x²/u)·u_t − u_x = 0 rewrites u_t ↦ u·u_x/x².
        let sp = JetSpace::new(vec![sym("t"), sym("x")], vec![sym("u")], vec![]).unwrap();
        let x2 = e(Atom::indep("x")).pow(2).unwrap();
        let f = x2.clone() * e(Atom::dep("u")).recip().unwrap() * e(jet("u", &["t"]))
            - e(jet("u", &["x"]));
        let r = Ranking::build(&sp, vec![(sym("F"), f, jet("u", &["t"]))]).unwrap();
        let want = (e(Atom::dep("u")) * e(jet("u", &["x"]))).try_div_reduced(&x2).unwrap();
        assert_eq!(r.rules()[0].rhs(), &want);
    }

    #[test]
    fn failure_modes() {
        let sp = JetSpace::new(vec![sym("t"), sym("x")], vec![sym("u")], vec![]).unwrap();
        // Quadratic in the lead.
        let f = e(jet("u", &["t"])).pow(2).unwrap() - e(Atom::dep("u"));
        assert!(matches!(
            Ranking::build(&sp, vec![(sym("F"), f, jet("u", &["t"]))]),
            Err(CoreError::NonlinearLead { .. })
        ));
        // Order-growing runaway u_t → u_tx → u_txx → … trips the jet cap.
        let g = e(jet("u", &["t"])) - e(jet("u", &["t", "x"]));
        assert!(matches!(
            Ranking::build(&sp, vec![(sym("G"), g, jet("u", &["t"]))]),
            Err(CoreError::OrderCap { .. })
        ));
        // A flat two-rule cycle u_t ↔ w_x trips the step cap instead.
        let sp2 =
            JetSpace::new(vec![sym("t"), sym("x")], vec![sym("u"), sym("w")], vec![]).unwrap();
        let c1 = e(jet("u", &["t"])) - e(jet("w", &["x"]));
        let c2 = e(jet("w", &["x"])) - e(jet("u", &["t"]));
        assert!(matches!(
            Ranking::build(
                &sp2,
                vec![
                    (sym("C1"), c1, jet("u", &["t"])),
                    (sym("C2"), c2, jet("w", &["x"]))
                ]
            ),
            Err(CoreError::ReductionDiverged(_))
        ));
        // Two rules on the same dependent.
        let a = e(jet("u", &["t"])) - e(Atom::dep("u"));
        let b = e(jet("u", &["x"])) - e(Atom::dep("u"));
        assert!(Ranking::build(
            &sp,
            vec![
                (sym("A"), a, jet("u", &["t"])),
                (sym("B"), b, jet("u", &["x"]))
            ]
        )
        .is_err());
    }

    #[test]
    fn symmetries_of_fixture_systems() {
        use crate::testkit;
        // Scaling acts on the heat equation by rescaling it: prX(F) = F ~ 0.
        let heat = testkit::heat(1);
        let mut scaling = Generator::new();
        scaling.set_eta("u", Expr::from_atom(Atom::dep("u")));
        let (ok, res) = check_symmetry(&heat, &scaling).unwrap();
        assert!(ok, "residuals {res:?}");

        let kp = testkit::kp();
        for x in [testkit::kp_xh(), testkit::kp_xg(), testkit::kp_xf()] {
            let (ok, res) = check_symmetry(&kp, &x).unwrap();
            assert!(ok, "residuals {res:?}");
        }
    }

    #[test]
    fn failed_symmetry_reports_the_residual() {
        use crate::testkit;
        // Shifting u by a constant is not a symmetry: prX(F1) = -u_x.
        let kp = testkit::kp();
        let mut shift = Generator::new();
        shift.set_eta("u", Expr::one());
        let (ok, res) = check_symmetry(&kp, &shift).unwrap();
        assert!(!ok);
        assert_eq!(res[0], -&e(jet("u", &["x"])));
        assert!(res[1].is_zero());
    }

    #[test]
    fn soundness_spot_check() {
        // Substituting a manifold-consistent point: u_t computed from the rule.
        let (sp, sys) = kdv();
        let r = solve_for_leading(&sys).unwrap();
        let input = e(jet("u", &["t"])) * e(jet("u", &["x"])) + e(Atom::dep("u"));
        let (nf, _) = reduce(&input, &r).unwrap();
        let mut vals = std::collections::BTreeMap::new();
        vals.insert(Atom::dep("u"), 1.25_f64);
        vals.insert(jet("u", &["x"]), -0.75);
        vals.insert(jet("u", &["x", "x", "x"]), 2.0);
        let rhs_val =
            crate::expr::eval_numeric(&r.rules()[0].rhs().clone(), &vals).unwrap();
        vals.insert(jet("u", &["t"]), rhs_val);
        let before = crate::expr::eval_numeric(&input, &vals).unwrap();
        let after = crate::expr::eval_numeric(&nf, &vals).unwrap();
        assert!((before - after).abs() < 1e-12);
        let _ = total_derivative(&sp, &input, &sym("x")).unwrap();
    }
}
