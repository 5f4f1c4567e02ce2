//! Fixture systems, symmetry generators, and randomized builders shared by
//! unit tests, integration tests, and benches. Not intended for downstream
//! use, but kept compiled so fixtures cannot rot silently.

use num::BigRational;
use rand::Rng;

use crate::expr::{Atom, Expr, MultiIndex, Sym};
use crate::jet::{total_derivative, Generator, JetSpace};
use crate::manifold::{solve_for_leading, Ranking};
use crate::system::{DiffSystem, Substitution};

pub fn sym(s: &str) -> Sym {
    Sym::new(s)
}

/// Jet atom with one direction per character: `jet("u", "txx")` is u_txx.
pub fn jet(dep: &str, idx: &str) -> Expr {
    Expr::from_atom(Atom::jet(
        dep,
        MultiIndex::new(idx.chars().map(|c| Sym::new(c.to_string())).collect()),
    ))
}

pub fn dep(d: &str) -> Expr {
    Expr::from_atom(Atom::dep(d))
}

pub fn indep(i: &str) -> Expr {
    Expr::from_atom(Atom::indep(i))
}

/// k-th derivative of a declared single-argument function: `func_d("f", "t", 2)` is f''.
pub fn func_d(name: &str, arg: &str, k: usize) -> Expr {
    let a = Sym::new(arg);
    Expr::from_atom(Atom::func(
        name,
        vec![a.clone()],
        MultiIndex::new(std::iter::repeat_with(|| a.clone()).take(k).collect()),
    ))
}

fn tx_space() -> JetSpace {
    JetSpace::new(vec![sym("t"), sym("x")], vec![sym("u")], vec![]).unwrap()
}

/// u_t = u u_x + u_xxx.
pub fn kdv() -> DiffSystem {
    let f = jet("u", "t") - dep("u") * jet("u", "x") - jet("u", "xxx");
    DiffSystem::new(tx_space(), vec![(sym("F"), f, None)]).unwrap()
}

/// u_t = u² u_xx.
pub fn nlheat() -> DiffSystem {
    let f = jet("u", "t") - dep("u") * dep("u") * jet("u", "xx");
    DiffSystem::new(tx_space(), vec![(sym("F"), f, None)]).unwrap()
}

/// u_t = x⁻² D_x(x⁴(u_x + u + u²)), cleared to a polynomial equation.
pub fn kompaneets() -> DiffSystem {
    let space = tx_space();
    let x4 = indep("x").pow(4).unwrap();
    let flux = x4 * (jet("u", "x") + dep("u") + dep("u") * dep("u"));
    let div = total_derivative(&space, &flux, &sym("x")).unwrap();
    let f = jet("u", "t") - div.try_div(&indep("x").pow(2).unwrap()).unwrap();
    DiffSystem::new(space, vec![(sym("F"), f, None)]).unwrap()
}

/// u_t = u u_x + u_xxx + w_y, w_x = u_y, with arbitrary functions f, g, h of t
/// declared for the symmetry families below.
pub fn kp() -> DiffSystem {
    let t = sym("t");
    let space = JetSpace::new(
        vec![t.clone(), sym("x"), sym("y")],
        vec![sym("u"), sym("w")],
        vec![
            (sym("f"), vec![t.clone()]),
            (sym("g"), vec![t.clone()]),
            (sym("h"), vec![t.clone()]),
        ],
    )
    .unwrap();
    let f1 = jet("u", "t") - dep("u") * jet("u", "x") - jet("u", "xxx") - jet("w", "y");
    let f2 = jet("w", "x") - jet("u", "y");
    DiffSystem::new(space, vec![(sym("F1"), f1, None), (sym("F2"), f2, None)]).unwrap()
}

pub fn spatial_names(n: usize) -> Vec<Sym> {
    ["x", "y", "z"][..n].iter().map(|s| sym(s)).collect()
}

/// u_t = Δu in n spatial dimensions (n ≤ 3).
pub fn heat(n: usize) -> DiffSystem {
    let mut indeps = vec![sym("t")];
    indeps.extend(spatial_names(n));
    let space = JetSpace::new(indeps, vec![sym("u")], vec![]).unwrap();
    let mut f = jet("u", "t");
    for xi in spatial_names(n) {
        f = f - Expr::from_atom(Atom::jet("u", MultiIndex::new(vec![xi.clone(), xi])));
    }
    DiffSystem::new(space, vec![(sym("F"), f, None)]).unwrap()
}

/// Heat system whose space also carries an arbitrary φ(t, x…), plus the
/// ranking extended with the rule φ_t ↦ −Δφ so that reductions may use the
/// fact that φ solves the adjoint (backward) heat equation.
pub fn heat_with_phi(n: usize) -> (DiffSystem, Ranking) {
    let t = sym("t");
    let mut indeps = vec![t.clone()];
    indeps.extend(spatial_names(n));
    let space = JetSpace::new(
        indeps.clone(),
        vec![sym("u")],
        vec![(sym("phi"), indeps.clone())],
    )
    .unwrap();
    let mut f = jet("u", "t");
    for xi in spatial_names(n) {
        f = f - Expr::from_atom(Atom::jet("u", MultiIndex::new(vec![xi.clone(), xi])));
    }
    let sys = DiffSystem::new(space.clone(), vec![(sym("F"), f, None)]).unwrap();
    let phi = |ix: MultiIndex| Expr::from_atom(Atom::func("phi", indeps.clone(), ix));
    let mut constraint = phi(MultiIndex::single(t.clone()));
    for xi in spatial_names(n) {
        constraint = constraint + phi(MultiIndex::new(vec![xi.clone(), xi]));
    }
    let mut entries: Vec<_> = sys
        .equations()
        .iter()
        .map(|e| (e.name().clone(), e.expr().clone(), e.lead().clone()))
        .collect();
    entries.push((
        sym("Adj"),
        constraint,
        Atom::func("phi", indeps, MultiIndex::single(t)),
    ));
    let ranking = Ranking::build(&space, entries).unwrap();
    (sys, ranking)
}

/// The φ(t, x…) of heat_with_phi as an expression, with derivative index `ix`.
pub fn heat_phi(n: usize, ix: &str) -> Expr {
    let mut args = vec![sym("t")];
    args.extend(spatial_names(n));
    Expr::from_atom(Atom::func(
        "phi",
        args,
        MultiIndex::new(ix.chars().map(|c| Sym::new(c.to_string())).collect()),
    ))
}

fn half() -> Expr {
    Expr::rat(1, 2)
}

/// KP symmetry family driven by f(t): generalized Galilean boosts.
pub fn kp_xf() -> Generator {
    let f = |k| func_d("f", "t", k);
    let (x, y) = (indep("x"), indep("y"));
    let y2 = y.pow(2).unwrap();
    let y3 = y.pow(3).unwrap();
    let mut gen = Generator::new();
    gen.set_xi("t", Expr::int(3) * f(0));
    gen.set_xi("x", f(1) * &x + half() * f(2) * &y2);
    gen.set_xi("y", Expr::int(2) * f(1) * &y);
    gen.set_eta(
        "u",
        -(Expr::int(2) * f(1) * dep("u") + f(2) * &x + half() * f(3) * &y2),
    );
    gen.set_eta(
        "w",
        -(Expr::int(3) * f(1) * dep("w")
            + f(2) * &y * dep("u")
            + f(3) * &x * &y
            + Expr::rat(1, 6) * f(4) * &y3),
    );
    gen
}

/// KP symmetry family driven by g(t): rotation-like flows in (x, y).
pub fn kp_xg() -> Generator {
    let g = |k| func_d("g", "t", k);
    let (x, y) = (indep("x"), indep("y"));
    let mut gen = Generator::new();
    gen.set_xi("x", g(1) * &y);
    gen.set_xi("y", Expr::int(2) * g(0));
    gen.set_eta("u", -(g(2) * &y));
    gen.set_eta(
        "w",
        -(g(1) * dep("u") + g(2) * &x + half() * g(3) * y.pow(2).unwrap()),
    );
    gen
}

/// KP symmetry family driven by h(t): x-translations with drift.
pub fn kp_xh() -> Generator {
    let h = |k| func_d("h", "t", k);
    let mut gen = Generator::new();
    gen.set_xi("x", h(0));
    gen.set_eta("u", -h(1));
    gen.set_eta("w", -(h(2) * indep("y")));
    gen
}

/// v := u^α componentwise (the identity substitution when exponent is 1).
pub fn identity_sub(sys: &DiffSystem) -> Substitution {
    let comps = sys.space().deps_u().iter().map(|d| dep(d.as_str())).collect();
    Substitution::new(sys.space(), comps).unwrap()
}

/// a·X + b·Y over the union of their coefficient slots.
pub fn combine(x: &Generator, y: &Generator, a: &BigRational, b: &BigRational) -> Generator {
    let mut out = Generator::new();
    let keys: std::collections::BTreeSet<_> =
        x.xi_map().keys().chain(y.xi_map().keys()).cloned().collect();
    for k in keys {
        out.set_xi(k.clone(), x.xi(&k).scale(a) + y.xi(&k).scale(b));
    }
    let keys: std::collections::BTreeSet<_> =
        x.eta_map().keys().chain(y.eta_map().keys()).cloned().collect();
    for k in keys {
        out.set_eta(k.clone(), x.eta(&k).scale(a) + y.eta(&k).scale(b));
    }
    out
}

/// Instantiate the arbitrary function `name` (single argument) as a concrete
/// polynomial in its argument throughout a generator's coefficients.
pub fn realize_func(gen: &Generator, space: &JetSpace, name: &str, poly: &Expr) -> Generator {
    let name = sym(name);
    let args = space.func_args(&name).expect("declared function").clone();
    debug_assert_eq!(args.len(), 1);
    let arg = sym(args[0].as_str());
    let mut out = Generator::new();
    let subst = |e: &Expr| -> Expr {
        let mut map = std::collections::BTreeMap::new();
        for a in e.atoms() {
            if let Atom::Func { name: n, index, .. } = &a {
                if n == &name {
                    let mut d = poly.clone();
                    for _ in 0..index.order() {
                        d = crate::jet::explicit_partial(space, &d, &arg).unwrap();
                    }
                    map.insert(a.clone(), d);
                }
            }
        }
        e.substitute(&map).unwrap()
    };
    for (k, e) in gen.xi_map() {
        out.set_xi(k.clone(), subst(e));
    }
    for (k, e) in gen.eta_map() {
        out.set_eta(k.clone(), subst(e));
    }
    out
}

pub fn ranking_of(sys: &DiffSystem) -> Ranking {
    solve_for_leading(sys).unwrap()
}

/// Random small nonzero rational.
pub fn rand_coeff(rng: &mut impl Rng) -> BigRational {
    let n = loop {
        let k = rng.gen_range(-4i64..=4);
        if k != 0 {
            break k;
        }
    };
    BigRational::new(n.into(), rng.gen_range(1i64..=4).into())
}

/// Random polynomial expression: up to `terms` monomials over `atoms` with
/// exponents ≤ 2.
pub fn rand_poly_expr(rng: &mut impl Rng, atoms: &[Atom], terms: usize) -> Expr {
    let mut e = Expr::zero();
    for _ in 0..rng.gen_range(1..=terms.max(1)) {
        let mut m = Expr::constant(rand_coeff(rng));
        for a in atoms {
            let k = rng.gen_range(0u32..=2);
            if k > 0 {
                m = m * Expr::from_atom(a.clone()).pow(k as i32).unwrap();
            }
        }
        e = e + m;
    }
    e
}
