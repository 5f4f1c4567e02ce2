//! Conserved vectors from symmetries: the formal Lagrangian of a system is
//! paired with a symmetry generator through a general-order Noether-type
//! formula, the adjoint variables are eliminated by a self-adjointness
//! substitution, and the result is checked both by certified reduction of the
//! divergence and by seeded numeric sampling.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, One};

use crate::adjoint::{formal_lagrangian, v_elimination_map};
use crate::error::{CoreError, Result};
use crate::expr::{clear_denominators, Atom, Expr, Monomial, Poly, Sym};
use crate::jet::{characteristic_expr, d_multi, total_derivative, Generator, JetSpace};
use crate::linalg::QMatrix;
use crate::manifold::{reduce, Certificate, Ranking};
use crate::numeric::{max_residual, NumericConfig};
use crate::system::{DiffSystem, Substitution};

const STRIP_ROUNDS: usize = 3;
const STRIP_CANDIDATE_CAP: usize = 2000;

/// W^α = η^α − ξ^j u^α_j for every u-block dependent, in declaration order.
#[derive(Debug, Clone)]
pub struct Characteristic {
    components: Vec<(Sym, Expr)>,
}

impl Characteristic {
    pub fn components(&self) -> &[(Sym, Expr)] {
        &self.components
    }

    pub fn of(&self, dep: &Sym) -> Option<&Expr> {
        self.components.iter().find(|(d, _)| d == dep).map(|(_, e)| e)
    }
}

pub fn characteristic(space: &JetSpace, x: &Generator) -> Result<Characteristic> {
    x.validate(space)?;
    let mut components = Vec::with_capacity(space.deps_u().len());
    for d in space.deps_u() {
        components.push((d.clone(), characteristic_expr(space, x, d)?));
    }
    Ok(Characteristic { components })
}

/// C^i = ξ^i L + Σ over jets u^α_J with i ∈ J of weighted products
/// D_A(W^α)·D_B(∂L/∂u^α_J), A ⊎ B = J ∖ {i}, sign (−1)^|B|, weight
/// mult(A)·mult(B)/mult(J). The weights make the sorted-multiset storage
/// reproduce the classical symmetric form, and the whole series satisfies
///   Σ_i D_i(C^i) = pr X(L) + L·Σ_i D_i(ξ^i) − Σ_α W^α·δL/δu^α
/// identically, which is what the tests pin down.
pub fn noether_components(space: &JetSpace, l: &Expr, x: &Generator) -> Result<Vec<Expr>> {
    x.validate(space)?;
    let mut w: BTreeMap<Sym, Expr> = BTreeMap::new();
    for d in space.deps_all() {
        w.insert(d.clone(), characteristic_expr(space, x, d)?);
    }
    let mut out = Vec::with_capacity(space.indeps().len());
    for i in space.indeps() {
        let mut c = x.xi(i) * l.clone();
        for a in l.atoms() {
            let Atom::Jet { dep, index } = &a else { continue };
            if index.count_of(i) == 0 {
                continue;
            }
            let dl = l.partial(&a);
            let j_mult = index.multiplicity();
            let rem = index.remove_one(i).expect("i occurs in the index");
            for (pa, pb) in rem.splits() {
                let weight =
                    BigRational::new(pa.multiplicity() * pb.multiplicity(), j_mult.clone());
                let term = (d_multi(space, &w[dep], &pa)? * d_multi(space, &dl, &pb)?)
                    .scale(&weight);
                c = if pb.order() % 2 == 1 { c - term } else { c + term };
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// A conserved-vector candidate with everything needed to verify or simplify
/// it later: the originating system, generator, substitution, and the ranking
/// (possibly extended with constraint rules) its divergence reduces under.
#[derive(Debug, Clone)]
pub struct ConservedVector {
    system: DiffSystem,
    generator: Generator,
    substitution: Substitution,
    ranking: Ranking,
    components: Vec<Expr>,
}

impl ConservedVector {
    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.components[i]
    }

    pub fn system(&self) -> &DiffSystem {
        &self.system
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn substitution(&self) -> &Substitution {
        &self.substitution
    }

    pub fn ranking(&self) -> &Ranking {
        &self.ranking
    }
}

fn adjoint_residuals_under(
    sys: &DiffSystem,
    sub: &Substitution,
    ranking: &Ranking,
) -> Result<Vec<Expr>> {
    let adj = crate::adjoint::adjoint_system(sys)?;
    let map = v_elimination_map(
        sys.space(),
        sub,
        adj.equations().iter().map(|(_, e)| e),
    )?;
    let mut out = Vec::with_capacity(adj.equations().len());
    for (_, fs) in adj.equations() {
        let substituted = fs.substitute(&map)?;
        out.push(reduce(&substituted, ranking)?.0);
    }
    Ok(out)
}

/// Construct and eliminate, refusing substitutions whose adjoint residual
/// does not vanish under `ranking`. The ranking may extend the system's
/// own rules with constraints, so a substitution that fails the bare
/// self-adjointness check (an arbitrary function pinned by a side condition,
/// say) can still be accepted here.
pub fn conserved_vector(
    sys: &DiffSystem,
    x: &Generator,
    sub: &Substitution,
    ranking: &Ranking,
) -> Result<ConservedVector> {
    let residuals = adjoint_residuals_under(sys, sub, ranking)?;
    if residuals.iter().any(|r| !r.is_zero()) {
        let shown = residuals
            .iter()
            .map(|r| format!("  {r}"))
            .collect::<Vec<_>>()
            .join("\n");
        return Err(CoreError::SubstitutionRejected(shown));
    }
    conserved_vector_unchecked(sys, x, sub, ranking)
}

/// Same construction without the self-adjointness gate.
pub fn conserved_vector_unchecked(
    sys: &DiffSystem,
    x: &Generator,
    sub: &Substitution,
    ranking: &Ranking,
) -> Result<ConservedVector> {
    x.validate(sys.space())?;
    let l = formal_lagrangian(sys);
    let raw = noether_components(sys.space(), &l, x)?;
    let map = v_elimination_map(sys.space(), sub, raw.iter())?;
    let mut components = Vec::with_capacity(raw.len());
    for c in &raw {
        components.push(c.substitute(&map)?);
    }
    Ok(ConservedVector {
        system: sys.clone(),
        generator: x.clone(),
        substitution: sub.clone(),
        ranking: ranking.clone(),
        components,
    })
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    /// Normal form of Σ D_i(C^i); zero exactly when the vector is conserved.
    pub residual: Expr,
    pub symbolic_ok: bool,
    /// Reduction certificate of the divergence, entries normalized on the
    /// manifold: the q in Σ D_i(C^i) = residual + Σ q·D_K(lead − rhs).
    pub certificate: Certificate,
    pub numeric_max: f64,
    pub numeric_ok: bool,
    pub seed: u64,
    pub verdict: bool,
}

pub fn verify(cv: &ConservedVector, cfg: &NumericConfig) -> Result<VerifyReport> {
    let space = cv.system.space();
    let mut terms = Vec::with_capacity(cv.components.len());
    for (i, c) in space.indeps().iter().zip(&cv.components) {
        terms.push(total_derivative(space, c, i)?);
    }
    let div: Expr = terms.iter().cloned().sum();
    let (residual, raw_cert) = reduce(&div, &cv.ranking)?;
    let mut certificate = Certificate::new();
    for (key, q) in &raw_cert {
        let nf = reduce(q, &cv.ranking)?.0;
        if !nf.is_zero() {
            certificate.insert(key.clone(), nf);
        }
    }
    let symbolic_ok = residual.is_zero();
    let numeric_max = max_residual(&cv.ranking, &terms, cfg)?;
    let numeric_ok = numeric_max <= cfg.tol;
    Ok(VerifyReport {
        residual,
        symbolic_ok,
        certificate,
        numeric_max,
        numeric_ok,
        seed: cfg.seed,
        verdict: symbolic_ok && numeric_ok,
    })
}

/// A monomial is out of place in component i when it carries a derivative
/// pointing in another direction; those parts are removable by antisymmetric
/// gauge terms. Arbitrary-function atoms are exempt: their derivatives are
/// data, not jet directions.
fn is_forbidden(m: &Monomial, i: &Sym) -> bool {
    m.factors().iter().any(|(a, _)| match a {
        Atom::Jet { index, .. } => !index.is_empty() && !index.is_pure(i),
        _ => false,
    })
}

/// Candidate gauge potentials for the cross-derivative monomials of
/// component `ci`: drop one off-direction derivative from one jet factor.
fn gauge_candidates(
    space: &JetSpace,
    ci: usize,
    e: &Expr,
) -> Vec<(usize, usize, Monomial, Poly)> {
    let indeps = space.indeps();
    let mut out = Vec::new();
    for (m, _) in e.num().terms() {
        if !is_forbidden(m, &indeps[ci]) {
            continue;
        }
        for (a, pow) in m.factors() {
            let Atom::Jet { dep, index } = a else { continue };
            for (dir, _) in index.counts() {
                if dir == indeps[ci] {
                    continue;
                }
                let cj = indeps.iter().position(|s| *s == dir).expect("declared");
                let lowered = index.remove_one(&dir).expect("dir occurs");
                let mut replaced: Vec<(Atom, u32)> = m
                    .factors()
                    .iter()
                    .filter(|(b, _)| b != a)
                    .cloned()
                    .collect();
                if *pow > 1 {
                    replaced.push((a.clone(), pow - 1));
                }
                replaced.push((Atom::jet(dep.clone(), lowered), 1));
                let pot = Monomial::from_powers(replaced);
                let (lo, hi) = if ci < cj { (ci, cj) } else { (cj, ci) };
                out.push((lo, hi, pot, e.den().clone()));
            }
        }
    }
    out
}

/// Remove the removable: reduce each component on the manifold, then cancel
/// every cross-derivative monomial by an antisymmetric pair of gauge terms
/// (A added as D_hi to component lo and subtracted as D_lo from component
/// hi), solving for all pair potentials jointly. The divergence is unchanged
/// identically, so a verified vector stays verified. If no combination of
/// candidates clears the cross terms, the reduced components are returned
/// unchanged.
pub fn strip_trivial(cv: &ConservedVector) -> Result<ConservedVector> {
    let space = cv.system.space();
    let indeps = space.indeps();
    let n = indeps.len();
    let mut base = Vec::with_capacity(n);
    for c in &cv.components {
        base.push(reduce(c, &cv.ranking)?.0);
    }
    if n < 2 {
        return Ok(ConservedVector { components: base, ..cv.clone() });
    }

    // Candidate potentials, grown by responding to the cross terms the
    // previous round's candidates themselves introduce.
    let mut seen: BTreeSet<(usize, usize, Monomial)> = BTreeSet::new();
    let mut candidates: Vec<(usize, usize, Expr)> = Vec::new();
    // responses[k][i] = manifold-reduced change to component i from candidate k.
    let mut responses: Vec<Vec<Expr>> = Vec::new();
    let mut frontier: Vec<(usize, Expr)> =
        base.iter().cloned().enumerate().collect();
    'rounds: for _ in 0..STRIP_ROUNDS {
        let mut fresh = Vec::new();
        for (ci, e) in &frontier {
            for (lo, hi, pot, den) in gauge_candidates(space, *ci, e) {
                if seen.insert((lo, hi, pot.clone())) {
                    let p = Expr::make(Poly::from_monomial(pot, BigRational::one()), den)?;
                    fresh.push((lo, hi, p));
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        frontier = Vec::new();
        for (lo, hi, p) in fresh {
            if candidates.len() >= STRIP_CANDIDATE_CAP {
                break 'rounds;
            }
            let d_hi = reduce(&total_derivative(space, &p, &indeps[hi])?, &cv.ranking)?.0;
            let d_lo = reduce(&total_derivative(space, &p, &indeps[lo])?, &cv.ranking)?.0;
            let mut resp = vec![Expr::zero(); n];
            resp[lo] = d_hi;
            resp[hi] = -&d_lo;
            frontier.push((lo, resp[lo].clone()));
            frontier.push((hi, resp[hi].clone()));
            responses.push(resp);
            candidates.push((lo, hi, p));
        }
    }
    if candidates.is_empty() {
        return Ok(ConservedVector { components: base, ..cv.clone() });
    }

    // Per component, put base and responses over one denominator and demand
    // that every cross-derivative monomial of the combination cancels.
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    for i in 0..n {
        let mut family = vec![base[i].clone()];
        family.extend(responses.iter().map(|r| r[i].clone()));
        let cleared = clear_denominators(&family);
        let monomials: BTreeSet<Monomial> = cleared
            .iter()
            .flat_map(|p| p.terms().iter().map(|(m, _)| m.clone()))
            .filter(|m| is_forbidden(m, &indeps[i]))
            .collect();
        for m in monomials {
            let coeff_of = |p: &Poly| {
                p.terms()
                    .iter()
                    .find(|(pm, _)| *pm == m)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(|| BigRational::from_integer(0.into()))
            };
            rows.push(cleared[1..].iter().map(&coeff_of).collect());
            rhs.push(-coeff_of(&cleared[0]));
        }
    }
    if rows.is_empty() {
        return Ok(ConservedVector { components: base, ..cv.clone() });
    }
    let mut m = QMatrix::zeros(rows.len(), candidates.len());
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            m.set(r, c, v.clone());
        }
    }
    let Some(sol) = m.solve(&rhs) else {
        return Ok(ConservedVector { components: base, ..cv.clone() });
    };
    let mut stripped = base;
    for (k, c) in sol.iter().enumerate() {
        if c == &BigRational::from_integer(0.into()) {
            continue;
        }
        for i in 0..n {
            if !responses[k][i].is_zero() {
                stripped[i] = &stripped[i] + &responses[k][i].scale(c);
            }
        }
    }
    Ok(ConservedVector { components: stripped, ..cv.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::MultiIndex;
    use crate::testkit::{
        self, dep, func_d, heat_phi, heat_with_phi, indep, jet, kdv, kp, sym,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn characteristic_examples() {
        let kdv = kdv();
        let mut time_shift = Generator::new();
        time_shift.set_xi("t", Expr::one());
        let w = characteristic(kdv.space(), &time_shift).unwrap();
        assert_eq!(w.of(&sym("u")).unwrap(), &-&jet("u", "t"));

        let heat = testkit::heat(1);
        let mut scaling = Generator::new();
        scaling.set_eta("u", dep("u"));
        let w = characteristic(heat.space(), &scaling).unwrap();
        assert_eq!(w.of(&sym("u")).unwrap(), &dep("u"));

        let kp = kp();
        let w = characteristic(kp.space(), &testkit::kp_xh()).unwrap();
        let h = |k| func_d("h", "t", k);
        assert_eq!(w.of(&sym("u")).unwrap(), &(-h(1) - h(0) * jet("u", "x")));
        assert_eq!(
            w.of(&sym("w")).unwrap(),
            &(-(h(2) * indep("y")) - h(0) * jet("w", "x"))
        );
    }

    /// The divergence identity that pins down the multiset weights: for any
    /// L and any generator, Σ D_i C^i = pr X(L) + L Σ D_i ξ^i − Σ W^α δL/δu^α
    /// exactly in the free jet algebra.
    #[test]
    fn divergence_identity_for_random_lagrangians() {
        let space = JetSpace::new(vec![sym("t"), sym("x")], vec![sym("u")], vec![]).unwrap();
        let atoms: Vec<Atom> = [
            ("u", ""),
            ("u", "t"),
            ("u", "x"),
            ("u", "xx"),
            ("v", ""),
            ("v", "x"),
            ("v", "t"),
        ]
        .iter()
        .map(|(d, ix)| {
            Atom::jet(
                *d,
                MultiIndex::new(ix.chars().map(|c| Sym::new(c.to_string())).collect()),
            )
        })
        .collect();
        let coeff_atoms: Vec<Atom> =
            vec![Atom::dep("u"), Atom::dep("v"), Atom::indep("x")];
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..12 {
            let l = testkit::rand_poly_expr(&mut rng, &atoms, 4);
            let mut x = Generator::new();
            x.set_xi("t", testkit::rand_poly_expr(&mut rng, &coeff_atoms, 2));
            x.set_xi("x", testkit::rand_poly_expr(&mut rng, &coeff_atoms, 2));
            x.set_eta("u", testkit::rand_poly_expr(&mut rng, &coeff_atoms, 2));
            x.set_eta("v", testkit::rand_poly_expr(&mut rng, &coeff_atoms, 2));

            let c = noether_components(&space, &l, &x).unwrap();
            let mut lhs = Expr::zero();
            for (i, ci) in space.indeps().iter().zip(&c) {
                lhs = lhs + total_derivative(&space, ci, i).unwrap();
            }
            let mut rhs = crate::jet::apply_generator(&space, &x, &l).unwrap();
            for i in space.indeps() {
                rhs = rhs + l.clone() * total_derivative(&space, &x.xi(i), i).unwrap();
            }
            for d in space.deps_all() {
                let w = characteristic_expr(&space, &x, d).unwrap();
                let euler = crate::jet::variational_derivative(&space, &l, d).unwrap();
                rhs = rhs - w * euler;
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn heat_vector_from_symbolic_adjoint_solution() {
        let (sys, ranking) = heat_with_phi(1);
        let mut scaling = Generator::new();
        scaling.set_eta("u", dep("u"));
        let sub = Substitution::new(sys.space(), vec![heat_phi(1, "")]).unwrap();
        let cv = conserved_vector(&sys, &scaling, &sub, &ranking).unwrap();
        let expected_t = heat_phi(1, "") * dep("u");
        let expected_x = dep("u") * heat_phi(1, "x") - heat_phi(1, "") * jet("u", "x");
        assert_eq!(cv.components()[0], expected_t);
        assert_eq!(cv.components()[1], expected_x);

        let report = verify(&cv, &NumericConfig::default()).unwrap();
        assert!(report.verdict, "report {report:?}");
        // The divergence is u·(phi_t + Δphi) + phi·(u_t − Δu): one multiplier
        // per rule, each of order zero.
        assert!(report
            .certificate
            .get(&(sym("F"), MultiIndex::empty()))
            .unwrap()
            .math_eq(&heat_phi(1, "")));
        assert!(report
            .certificate
            .get(&(sym("Adj"), MultiIndex::empty()))
            .unwrap()
            .math_eq(&dep("u")));
    }

    #[test]
    fn projective_heat_vector_needs_no_constraint() {
        // phi = (x² − 2t)/4 solves the backward heat equation outright, so the
        // plain system ranking accepts it.
        let sys = testkit::heat(1);
        let ranking = testkit::ranking_of(&sys);
        let phi = (indep("x").pow(2).unwrap() - Expr::int(2) * indep("t"))
            .scale(&BigRational::new(1.into(), 4.into()));
        let sub = Substitution::new(sys.space(), vec![phi.clone()]).unwrap();
        let mut scaling = Generator::new();
        scaling.set_eta("u", dep("u"));
        let cv = conserved_vector(&sys, &scaling, &sub, &ranking).unwrap();
        assert_eq!(cv.components()[0], phi.clone() * dep("u"));
        assert_eq!(
            cv.components()[1],
            indep("x").scale(&BigRational::new(1.into(), 2.into())) * dep("u")
                - phi * jet("u", "x")
        );
        assert!(verify(&cv, &NumericConfig::default()).unwrap().verdict);
    }

    #[test]
    fn rejected_substitution_carries_the_residual() {
        let sys = testkit::nlheat();
        let sub = testkit::identity_sub(&sys);
        let ranking = testkit::ranking_of(&sys);
        let mut scaling = Generator::new();
        scaling.set_eta("u", dep("u"));
        let err = conserved_vector(&sys, &scaling, &sub, &ranking).unwrap_err();
        assert!(matches!(err, CoreError::SubstitutionRejected(_)));
        // The unchecked path still constructs something.
        let cv = conserved_vector_unchecked(&sys, &scaling, &sub, &ranking).unwrap();
        assert_eq!(cv.components().len(), 2);
    }

    #[test]
    fn kdv_translation_vector_verifies() {
        let sys = kdv();
        let ranking = testkit::ranking_of(&sys);
        let mut shift = Generator::new();
        shift.set_xi("x", Expr::one());
        let cv =
            conserved_vector(&sys, &shift, &testkit::identity_sub(&sys), &ranking).unwrap();
        let report = verify(&cv, &NumericConfig::default()).unwrap();
        assert!(report.symbolic_ok);
        assert!(report.numeric_ok, "max residual {}", report.numeric_max);
    }

    #[test]
    fn zero_vector_passes_and_junk_fails() {
        let sys = kp();
        let ranking = testkit::ranking_of(&sys);
        let zero = ConservedVector {
            system: sys.clone(),
            generator: Generator::new(),
            substitution: testkit::identity_sub(&sys),
            ranking: ranking.clone(),
            components: vec![Expr::zero(), Expr::zero(), Expr::zero()],
        };
        assert!(verify(&zero, &NumericConfig::default()).unwrap().verdict);

        let junk = ConservedVector {
            components: vec![dep("u"), Expr::zero(), Expr::zero()],
            ..zero.clone()
        };
        let report = verify(&junk, &NumericConfig::default()).unwrap();
        assert!(!report.symbolic_ok);
        assert!(!report.numeric_ok);
        // D_t(u) reduces to the right-hand side of the evolution rule.
        let expected = dep("u") * jet("u", "x") + jet("u", "xxx") + jet("w", "y");
        assert_eq!(report.residual, expected);
    }

    #[test]
    fn strip_removes_an_antisymmetric_remainder() {
        let sys = kp();
        let ranking = testkit::ranking_of(&sys);
        let cv = conserved_vector(
            &sys,
            &testkit::kp_xh(),
            &testkit::identity_sub(&sys),
            &ranking,
        )
        .unwrap();
        let clean = strip_trivial(&cv).unwrap();

        // Pollute with A = u·y over the (t, y) pair: +D_y(A) to C^t, −D_t(A)
        // to C^y. The divergence is unchanged, and stripping recovers the
        // clean components exactly.
        let space = sys.space();
        let a = dep("u") * indep("y");
        let mut polluted = clean.clone();
        polluted.components[0] =
            &polluted.components[0] + &total_derivative(space, &a, &sym("y")).unwrap();
        polluted.components[2] =
            &polluted.components[2] - &total_derivative(space, &a, &sym("t")).unwrap();
        assert!(verify(&polluted, &NumericConfig::default()).unwrap().verdict);
        let restored = strip_trivial(&polluted).unwrap();
        assert_eq!(restored.components(), clean.components());
    }

    #[test]
    fn stripped_xh_vector_is_minimal() {
        let sys = kp();
        let ranking = testkit::ranking_of(&sys);
        let cv = conserved_vector(
            &sys,
            &testkit::kp_xh(),
            &testkit::identity_sub(&sys),
            &ranking,
        )
        .unwrap();
        let stripped = strip_trivial(&cv).unwrap();
        assert!(verify(&stripped, &NumericConfig::default()).unwrap().verdict);
        let h = |k| func_d("h", "t", k);
        let half = Expr::rat(1, 2);
        let expected = [
            dep("u") * h(1),
            indep("y") * dep("w") * h(2)
                - (jet("u", "xx") + half * dep("u").pow(2).unwrap()) * h(1),
            -(dep("w") * h(1)) - indep("y") * dep("u") * h(2),
        ];
        // One overall constant for the whole vector.
        let scale = stripped.components()[0]
            .try_div(&expected[0])
            .unwrap()
            .as_constant()
            .cloned()
            .expect("constant ratio");
        for (got, want) in stripped.components().iter().zip(&expected) {
            assert_eq!(got, &want.scale(&scale), "scale {scale}");
        }
    }

    #[test]
    fn minimal_heat_vector_is_unchanged_by_strip() {
        let (sys, ranking) = heat_with_phi(1);
        let mut scaling = Generator::new();
        scaling.set_eta("u", dep("u"));
        let sub = Substitution::new(sys.space(), vec![heat_phi(1, "")]).unwrap();
        let cv = conserved_vector(&sys, &scaling, &sub, &ranking).unwrap();
        let stripped = strip_trivial(&cv).unwrap();
        assert_eq!(stripped.components(), cv.components());
    }
}
