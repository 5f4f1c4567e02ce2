//! Jet-space bookkeeping and the differential operators built on it: total
//! derivatives, variational derivatives, and prolongation of generators.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::expr::{Atom, Expr, MultiIndex, Sym};

/// The coordinate ring data: independents, the u-block of dependents, the
/// auto-generated v-block of equal length, and declared arbitrary functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetSpace {
    indeps: Vec<Sym>,
    deps_u: Vec<Sym>,
    deps_v: Vec<Sym>,
    funcs: Vec<(Sym, Arc<Vec<Sym>>)>,
    max_order: usize,
}

pub const DEFAULT_MAX_ORDER: usize = 10;

impl JetSpace {
    /// One v-block name per u-dependent. Single equations get the
    /// conventional `v`, pairs get `v`, `z`; beyond that, numbered names.
    fn adjoint_names(m: usize) -> Vec<Sym> {
        match m {
            1 => vec![Sym::new("v")],
            2 => vec![Sym::new("v"), Sym::new("z")],
            _ => (1..=m).map(|k| Sym::new(&format!("v{k}"))).collect(),
        }
    }

    pub fn new(
        indeps: Vec<Sym>,
        deps_u: Vec<Sym>,
        funcs: Vec<(Sym, Vec<Sym>)>,
    ) -> Result<JetSpace> {
        if indeps.is_empty() {
            return Err(CoreError::Invalid("no independent variables".into()));
        }
        if deps_u.is_empty() {
            return Err(CoreError::Invalid("no dependent variables".into()));
        }
        let deps_v = JetSpace::adjoint_names(deps_u.len());
        let mut seen: Vec<&Sym> = Vec::new();
        for s in indeps
            .iter()
            .chain(deps_u.iter())
            .chain(funcs.iter().map(|(n, _)| n))
        {
            if seen.contains(&s) {
                return Err(CoreError::Invalid(format!("name '{s}' declared twice")));
            }
            seen.push(s);
        }
        for v in &deps_v {
            if seen.contains(&v) {
                return Err(CoreError::Invalid(format!(
                    "name '{v}' is reserved for an adjoint variable; rename it"
                )));
            }
        }
        for (name, args) in &funcs {
            if args.is_empty() {
                return Err(CoreError::Invalid(format!(
                    "arbitrary function '{name}' needs at least one argument"
                )));
            }
            for a in args {
                if !indeps.contains(a) {
                    return Err(CoreError::NotIndependent(a.to_string()));
                }
            }
        }
        Ok(JetSpace {
            indeps,
            deps_u,
            deps_v,
            funcs: funcs.into_iter().map(|(n, a)| (n, Arc::new(a))).collect(),
            max_order: DEFAULT_MAX_ORDER,
        })
    }

    pub fn with_max_order(mut self, cap: usize) -> JetSpace {
        self.max_order = cap;
        self
    }

    pub fn indeps(&self) -> &[Sym] {
        &self.indeps
    }

    pub fn deps_u(&self) -> &[Sym] {
        &self.deps_u
    }

    pub fn deps_v(&self) -> &[Sym] {
        &self.deps_v
    }

    /// u-block then v-block, in declaration order.
    pub fn deps_all(&self) -> impl Iterator<Item = &Sym> {
        self.deps_u.iter().chain(self.deps_v.iter())
    }

    pub fn funcs(&self) -> &[(Sym, Arc<Vec<Sym>>)] {
        &self.funcs
    }

    pub fn func_args(&self, name: &Sym) -> Option<&Arc<Vec<Sym>>> {
        self.funcs.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn is_indep(&self, s: &Sym) -> bool {
        self.indeps.contains(s)
    }

    pub fn is_dep_u(&self, s: &Sym) -> bool {
        self.deps_u.contains(s)
    }

    pub fn is_dep_v(&self, s: &Sym) -> bool {
        self.deps_v.contains(s)
    }

    pub fn is_dep(&self, s: &Sym) -> bool {
        self.is_dep_u(s) || self.is_dep_v(s)
    }

    /// Position of a u-dependent in declaration order.
    pub fn u_index(&self, s: &Sym) -> Option<usize> {
        self.deps_u.iter().position(|d| d == s)
    }

    pub fn v_of(&self, alpha: usize) -> &Sym {
        &self.deps_v[alpha]
    }
}

/// The atom an application of D_i turns `a` into, if any. Independents have
/// no chain-rule image; arbitrary functions only move along their own
/// arguments.
fn bump(a: &Atom, i: &Sym) -> Option<Atom> {
    match a {
        Atom::Indep(_) => None,
        Atom::Jet { dep, index } => Some(Atom::Jet { dep: dep.clone(), index: index.push(i) }),
        Atom::Func { name, args, index } => {
            if args.contains(i) {
                Some(Atom::Func {
                    name: name.clone(),
                    args: args.clone(),
                    index: index.push(i),
                })
            } else {
                None
            }
        }
    }
}

/// ∂e/∂x_i holding all jet coordinates fixed. Arbitrary functions are
/// functions of x alone, so the chain rule still runs through them.
pub fn explicit_partial(space: &JetSpace, e: &Expr, i: &Sym) -> Result<Expr> {
    if !space.is_indep(i) {
        return Err(CoreError::NotIndependent(i.to_string()));
    }
    let mut acc = e.partial(&Atom::Indep(i.clone()));
    for a in e.atoms() {
        if matches!(a, Atom::Func { .. }) {
            if let Some(b) = bump(&a, i) {
                if b.order() > space.max_order() {
                    return Err(CoreError::OrderCap { cap: space.max_order() });
                }
                acc = acc + e.partial(&a) * Expr::from_atom(b);
            }
        }
    }
    Ok(acc)
}

/// Total derivative D_i: the explicit part plus the chain rule over every
/// jet coordinate present in `e`.
pub fn total_derivative(space: &JetSpace, e: &Expr, i: &Sym) -> Result<Expr> {
    let mut acc = explicit_partial(space, e, i)?;
    for a in e.atoms() {
        if matches!(a, Atom::Jet { .. }) {
            let b = bump(&a, i).expect("jets differentiate in every direction");
            if b.order() > space.max_order() {
                return Err(CoreError::OrderCap { cap: space.max_order() });
            }
            acc = acc + e.partial(&a) * Expr::from_atom(b);
        }
    }
    Ok(acc)
}

/// D_J = D_{i_1} ⋯ D_{i_s}; the D_i commute, so the sorted order is as good
/// as any.
pub fn d_multi(space: &JetSpace, e: &Expr, j: &MultiIndex) -> Result<Expr> {
    let mut acc = e.clone();
    for i in j.iter() {
        acc = total_derivative(space, &acc, i)?;
    }
    Ok(acc)
}

/// Variational derivative δ/δ(target): the alternating series
/// Σ_J (−1)^{|J|} D_J ∂/∂(target_J), truncated at the orders actually
/// present. Mixed coordinates are stored once per sorted multi-index, so the
/// sum runs over those representatives with no extra weights.
pub fn variational_derivative(space: &JetSpace, l: &Expr, target: &Sym) -> Result<Expr> {
    if !space.is_dep(target) {
        return Err(CoreError::NotDependent(target.to_string()));
    }
    let mut acc = Expr::zero();
    for a in l.atoms() {
        if let Atom::Jet { dep, index } = &a {
            if dep == target {
                let term = d_multi(space, &l.partial(&a), index)?;
                acc = if index.order() % 2 == 0 { acc + term } else { acc - term };
            }
        }
    }
    Ok(acc)
}

/// A generator ξ^i ∂/∂x^i + η^α ∂/∂u^α. Coefficients may involve jet
/// coordinates (generalized symmetries are fine); absent entries are zero.
/// η entries for v-block names drive the auxiliary variables when present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Generator {
    xi: BTreeMap<Sym, Expr>,
    eta: BTreeMap<Sym, Expr>,
}

impl Generator {
    pub fn new() -> Generator {
        Generator::default()
    }

    pub fn set_xi(&mut self, i: impl Into<Sym>, e: Expr) {
        self.xi.insert(i.into(), e);
    }

    pub fn set_eta(&mut self, dep: impl Into<Sym>, e: Expr) {
        self.eta.insert(dep.into(), e);
    }

    pub fn xi(&self, i: &Sym) -> Expr {
        self.xi.get(i).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn eta(&self, dep: &Sym) -> Expr {
        self.eta.get(dep).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn xi_map(&self) -> &BTreeMap<Sym, Expr> {
        &self.xi
    }

    pub fn eta_map(&self) -> &BTreeMap<Sym, Expr> {
        &self.eta
    }

    pub fn validate(&self, space: &JetSpace) -> Result<()> {
        for i in self.xi.keys() {
            if !space.is_indep(i) {
                return Err(CoreError::NotIndependent(i.to_string()));
            }
        }
        for d in self.eta.keys() {
            if !space.is_dep(d) {
                return Err(CoreError::NotDependent(d.to_string()));
            }
        }
        Ok(())
    }
}

/// W^α = η^α − ξ^j u^α_j for one dependent.
pub fn characteristic_expr(space: &JetSpace, x: &Generator, dep: &Sym) -> Result<Expr> {
    if !space.is_dep(dep) {
        return Err(CoreError::NotDependent(dep.to_string()));
    }
    let mut w = x.eta(dep);
    for (j, xi) in x.xi_map() {
        let uj = Expr::from_atom(Atom::Jet { dep: dep.clone(), index: MultiIndex::single(j.clone()) });
        w = w - xi.clone() * uj;
    }
    Ok(w)
}

/// Prolongation coefficient for the ∂/∂(dep_J) slot, in the closed form
/// ζ_J = D_J(W) + ξ^j dep_{J⊎j}.
pub fn zeta(space: &JetSpace, x: &Generator, dep: &Sym, j: &MultiIndex) -> Result<Expr> {
    if j.is_empty() {
        return Ok(x.eta(dep));
    }
    let w = characteristic_expr(space, x, dep)?;
    let mut z = d_multi(space, &w, j)?;
    for (i, xi) in x.xi_map() {
        let a = Atom::Jet { dep: dep.clone(), index: j.push(i) };
        z = z + xi.clone() * Expr::from_atom(a);
    }
    Ok(z)
}

/// Every sorted multi-index over `indeps` with order ≤ `order`.
pub fn multi_indices(indeps: &[Sym], order: usize) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::empty()];
    let mut frontier = vec![MultiIndex::empty()];
    for _ in 0..order {
        let mut next = Vec::new();
        for j in &frontier {
            // Extend only by symbols ≥ the last one to hit each multiset once.
            let floor = j.parts().last();
            for i in indeps {
                if floor.map_or(true, |f| i >= f) {
                    next.push(j.push(i));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Full coefficient table of the prolonged generator: (dep, J) → ζ for all
/// dependents in both blocks and all |J| ≤ order.
pub fn prolong(
    space: &JetSpace,
    x: &Generator,
    order: usize,
) -> Result<BTreeMap<(Sym, MultiIndex), Expr>> {
    x.validate(space)?;
    let mut out = BTreeMap::new();
    for dep in space.deps_all() {
        for j in multi_indices(space.indeps(), order) {
            let z = zeta(space, x, dep, &j)?;
            out.insert((dep.clone(), j), z);
        }
    }
    Ok(out)
}

/// Action of the prolonged generator on an expression, computed lazily over
/// the atoms that actually occur.
pub fn apply_generator(space: &JetSpace, x: &Generator, e: &Expr) -> Result<Expr> {
    x.validate(space)?;
    let mut acc = Expr::zero();
    for (i, xi) in x.xi_map() {
        acc = acc + xi.clone() * explicit_partial(space, e, i)?;
    }
    for a in e.atoms() {
        if let Atom::Jet { dep, index } = &a {
            let z = zeta(space, x, dep, index)?;
            acc = acc + z * e.partial(&a);
        }
    }
    Ok(acc)
}
