//! Systems F_α = 0 with one equation per u-dependent, plus substitutions
//! v^α = φ^α(x, u) used to eliminate the auxiliary variables.

use crate::error::{CoreError, Result};
use crate::expr::{Atom, Expr, Sym};
use crate::jet::JetSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    name: Sym,
    expr: Expr,
    lead: Atom,
}

impl Equation {
    pub fn name(&self) -> &Sym {
        &self.name
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn lead(&self) -> &Atom {
        &self.lead
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffSystem {
    space: JetSpace,
    equations: Vec<Equation>,
}

/// Every atom in `e` must be declared in `space`; arbitrary functions must
/// match their declared argument lists.
pub fn validate_expr_in_space(space: &JetSpace, e: &Expr) -> Result<()> {
    for a in e.atoms() {
        match &a {
            Atom::Indep(s) => {
                if !space.is_indep(s) {
                    return Err(CoreError::BadSystem(format!("undeclared symbol '{s}'")));
                }
            }
            Atom::Jet { dep, .. } => {
                if !space.is_dep(dep) {
                    return Err(CoreError::BadSystem(format!("undeclared dependent '{dep}'")));
                }
            }
            Atom::Func { name, args, .. } => match space.func_args(name) {
                Some(declared) if declared.as_slice() == args.as_slice() => {}
                Some(_) => {
                    return Err(CoreError::BadSystem(format!(
                        "function '{name}' used with the wrong arguments"
                    )))
                }
                None => {
                    return Err(CoreError::BadSystem(format!(
                        "undeclared arbitrary function '{name}'"
                    )))
                }
            },
        }
    }
    Ok(())
}

/// Default lead for equation α: among the jets of u^α occurring in F_α,
/// maximize the per-direction derivative counts compared lexicographically in
/// the independents' declaration order. Evolution equations declared with time
/// first therefore lead with the time derivative.
fn default_lead(space: &JetSpace, dep: &Sym, f: &Expr) -> Option<Atom> {
    let mut best: Option<(Vec<usize>, Atom)> = None;
    for a in f.atoms() {
        if let Atom::Jet { dep: d, index } = &a {
            if d == dep && index.order() >= 1 {
                let key: Vec<usize> =
                    space.indeps().iter().map(|i| index.count_of(i)).collect();
                if best.as_ref().map_or(true, |(k, _)| key > *k) {
                    best = Some((key, a.clone()));
                }
            }
        }
    }
    best.map(|(_, a)| a)
}

impl DiffSystem {
    /// `equations[α]` belongs to `space.deps_u()[α]`; a `None` lead picks the
    /// default ranking for that dependent.
    pub fn new(space: JetSpace, equations: Vec<(Sym, Expr, Option<Atom>)>) -> Result<DiffSystem> {
        let m = space.deps_u().len();
        if equations.len() != m {
            return Err(CoreError::BadSystem(format!(
                "expected {m} equations for {m} dependents, got {}",
                equations.len()
            )));
        }
        let mut built = Vec::with_capacity(m);
        for (alpha, (name, expr, lead)) in equations.into_iter().enumerate() {
            let dep = &space.deps_u()[alpha];
            if built.iter().any(|e: &Equation| e.name == name) {
                return Err(CoreError::BadSystem(format!("equation '{name}' declared twice")));
            }
            if expr.is_zero() {
                return Err(CoreError::BadSystem(format!(
                    "equation '{name}' is identically zero"
                )));
            }
            for a in expr.atoms() {
                if let Atom::Jet { dep: d, .. } = &a {
                    if space.is_dep_v(d) {
                        return Err(CoreError::BadSystem(format!(
                            "equation '{name}' references adjoint variable '{d}'"
                        )));
                    }
                }
            }
            validate_expr_in_space(&space, &expr)?;
            let lead = match lead {
                Some(a) => {
                    let ok = matches!(&a, Atom::Jet { dep: d, index } if d == dep && index.order() >= 1);
                    if !ok {
                        return Err(CoreError::BadSystem(format!(
                            "lead of equation '{name}' must be a derivative of '{dep}'"
                        )));
                    }
                    if !expr.contains_atom(&a) {
                        return Err(CoreError::BadSystem(format!(
                            "equation '{name}' does not contain its lead {a}"
                        )));
                    }
                    a
                }
                None => default_lead(&space, dep, &expr).ok_or_else(|| {
                    CoreError::BadSystem(format!(
                        "equation '{name}' contains no derivative of '{dep}'"
                    ))
                })?,
            };
            built.push(Equation { name, expr, lead });
        }
        Ok(DiffSystem { space, equations: built })
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn m(&self) -> usize {
        self.equations.len()
    }

    /// Highest derivative order occurring across the system.
    pub fn order(&self) -> usize {
        self.equations
            .iter()
            .flat_map(|e| e.expr.atoms())
            .map(|a| a.order())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubClass {
    /// v^α = u^α.
    Strict,
    /// φ = φ(u) only.
    Quasi,
    /// φ = φ(x, u), possibly through arbitrary functions of x.
    General,
}

impl std::fmt::Display for SubClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SubClass::Strict => "strict",
            SubClass::Quasi => "quasi",
            SubClass::General => "general",
        })
    }
}

/// v^α = φ^α(x, u): one component per u-dependent, no derivatives inside.
#[derive(Debug, Clone, PartialEq)]
pub struct Substitution {
    components: Vec<Expr>,
    class: SubClass,
}

impl Substitution {
    pub fn new(space: &JetSpace, components: Vec<Expr>) -> Result<Substitution> {
        let m = space.deps_u().len();
        if components.len() != m {
            return Err(CoreError::Invalid(format!(
                "substitution needs {m} components, got {}",
                components.len()
            )));
        }
        if components.iter().all(|c| c.is_zero()) {
            return Err(CoreError::ZeroSubstitution);
        }
        let mut saw_x = false;
        for c in &components {
            validate_expr_in_space(space, c)?;
            for a in c.atoms() {
                match &a {
                    Atom::Indep(_) | Atom::Func { .. } => saw_x = true,
                    Atom::Jet { dep, index } => {
                        if space.is_dep_v(dep) {
                            return Err(CoreError::SubstitutionUsesAdjoint(dep.to_string()));
                        }
                        if !index.is_empty() {
                            return Err(CoreError::DifferentialSubstitution(a.to_string()));
                        }
                    }
                }
            }
        }
        let strict = components
            .iter()
            .zip(space.deps_u())
            .all(|(c, d)| *c == Expr::from_atom(Atom::dep(d.clone())));
        let class = if strict {
            SubClass::Strict
        } else if saw_x {
            SubClass::General
        } else {
            SubClass::Quasi
        };
        Ok(Substitution { components, class })
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, alpha: usize) -> &Expr {
        &self.components[alpha]
    }

    pub fn class(&self) -> SubClass {
        self.class
    }

    /// c·φ, used by scaling-covariance checks.
    pub fn scaled(&self, space: &JetSpace, c: &num::BigRational) -> Result<Substitution> {
        Substitution::new(space, self.components.iter().map(|e| e.scale(c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::MultiIndex;

    fn sym(s: &str) -> Sym {
        Sym::new(s)
    }

    fn jet(dep: &str, idx: &[&str]) -> Atom {
        Atom::jet(dep, MultiIndex::new(idx.iter().map(Sym::new).collect()))
    }

    fn e(a: Atom) -> Expr {
        Expr::from_atom(a)
    }

    fn kdv() -> (JetSpace, Expr) {
        let sp = JetSpace::new(vec![sym("t"), sym("x")], vec![sym("u")], vec![]).unwrap();
        let f = e(jet("u", &["t"])) - e(jet("u", &["x", "x", "x"])) - e(Atom::dep("u")) * e(jet("u", &["x"]));
        (sp, f)
    }

    #[test]
    fn default_lead_prefers_the_first_independent() {
        let (sp, f) = kdv();
        let sys = DiffSystem::new(sp, vec![(sym("F"), f, None)]).unwrap();
        assert_eq!(sys.equations()[0].lead(), &jet("u", &["t"]));
        assert_eq!(sys.order(), 3);
    }

    #[test]
    fn pair_system_leads() {
        // u_t − ω_y = 0, ω_x − u_y = 0: the second equation leads with ω_x.
        let sp = JetSpace::new(
            vec![sym("t"), sym("x"), sym("y")],
            vec![sym("u"), sym("w")],
            vec![],
        )
        .unwrap();
        let f1 = e(jet("u", &["t"])) - e(jet("w", &["y"]));
        let f2 = e(jet("w", &["x"])) - e(jet("u", &["y"]));
        let sys =
            DiffSystem::new(sp, vec![(sym("F"), f1, None), (sym("G"), f2, None)]).unwrap();
        assert_eq!(sys.equations()[0].lead(), &jet("u", &["t"]));
        assert_eq!(sys.equations()[1].lead(), &jet("w", &["x"]));
    }

    #[test]
    fn explicit_lead_is_checked() {
        let (sp, f) = kdv();
        let sys = DiffSystem::new(
            sp.clone(),
            vec![(sym("F"), f.clone(), Some(jet("u", &["x", "x", "x"])))],
        )
        .unwrap();
        assert_eq!(sys.equations()[0].lead(), &jet("u", &["x", "x", "x"]));
        // Lead absent from the equation.
        assert!(DiffSystem::new(
            sp.clone(),
            vec![(sym("F"), f.clone(), Some(jet("u", &["t", "t"])))]
        )
        .is_err());
        // Lead on the wrong dependent.
        assert!(DiffSystem::new(sp, vec![(sym("F"), f, Some(jet("v", &["t"])))]).is_err());
    }

    #[test]
    fn construction_rejects_malformed_systems() {
        let (sp, f) = kdv();
        assert!(matches!(
            DiffSystem::new(sp.clone(), vec![]),
            Err(CoreError::BadSystem(_))
        ));
        assert!(DiffSystem::new(sp.clone(), vec![(sym("F"), Expr::zero(), None)]).is_err());
        let with_v = f.clone() + e(Atom::dep("v"));
        assert!(DiffSystem::new(sp.clone(), vec![(sym("F"), with_v, None)]).is_err());
        let undeclared = e(jet("q", &["t"]));
        assert!(DiffSystem::new(sp.clone(), vec![(sym("F"), undeclared, None)]).is_err());
        let algebraic = e(Atom::dep("u")) + e(Atom::indep("x"));
        assert!(DiffSystem::new(sp, vec![(sym("F"), algebraic, None)]).is_err());
    }

    #[test]
    fn substitution_classes() {
        let (sp, _) = kdv();
        let strict = Substitution::new(&sp, vec![e(Atom::dep("u"))]).unwrap();
        assert_eq!(strict.class(), SubClass::Strict);
        let quasi = Substitution::new(&sp, vec![e(Atom::dep("u")).pow(-2).unwrap()]).unwrap();
        assert_eq!(quasi.class(), SubClass::Quasi);
        let general = Substitution::new(&sp, vec![e(Atom::indep("x")).pow(2).unwrap()]).unwrap();
        assert_eq!(general.class(), SubClass::General);

        let sp2 = JetSpace::new(
            vec![sym("t"), sym("x"), sym("y")],
            vec![sym("u"), sym("w")],
            vec![],
        )
        .unwrap();
        let ident =
            Substitution::new(&sp2, vec![e(Atom::dep("u")), e(Atom::dep("w"))]).unwrap();
        assert_eq!(ident.class(), SubClass::Strict);
        // One vanishing component is fine; all vanishing is not.
        assert!(Substitution::new(&sp2, vec![e(Atom::dep("u")), Expr::zero()]).is_ok());
        assert!(matches!(
            Substitution::new(&sp2, vec![Expr::zero(), Expr::zero()]),
            Err(CoreError::ZeroSubstitution)
        ));
    }

    #[test]
    fn substitution_rejections() {
        let (sp, _) = kdv();
        assert!(matches!(
            Substitution::new(&sp, vec![e(jet("u", &["x"]))]),
            Err(CoreError::DifferentialSubstitution(_))
        ));
        assert!(matches!(
            Substitution::new(&sp, vec![e(Atom::dep("v"))]),
            Err(CoreError::SubstitutionUsesAdjoint(_))
        ));
        assert!(Substitution::new(&sp, vec![e(Atom::dep("u")), e(Atom::dep("u"))]).is_err());
    }

    #[test]
    fn arbitrary_functions_classify_as_general() {
        let sp = JetSpace::new(
            vec![sym("t"), sym("x")],
            vec![sym("u")],
            vec![(sym("phi"), vec![sym("t"), sym("x")])],
        )
        .unwrap();
        let phi = e(Atom::func("phi", vec![sym("t"), sym("x")], MultiIndex::empty()));
        let sub = Substitution::new(&sp, vec![phi]).unwrap();
        assert_eq!(sub.class(), SubClass::General);
    }
}
