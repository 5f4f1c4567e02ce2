//! Resolved model files. Declarations are collected in a first pass so
//! statements may appear in any order; expressions are then resolved against
//! them, and every block is validated eagerly so diagnostics carry source
//! positions instead of surfacing later inside a command.

use adjflux_core::expr::{Atom, Expr, MultiIndex, Sym};
use adjflux_core::jet::{Generator, JetSpace};
use adjflux_core::manifold::{solve_for_leading, Ranking};
use adjflux_core::system::{DiffSystem, Substitution};
use adjflux_core::Result as CoreResult;

use crate::lex::Diag;
use crate::parse::{parse_model_text, Name, RawExpr, RawItem, RawValue};

const RESERVED: &[&str] = &[
    "independents",
    "dependents",
    "arbitrary",
    "equation",
    "constraint",
    "symmetry",
    "substitution",
    "option",
    "lead",
    "xi",
    "eta",
    "v",
    "D",
];

#[derive(Debug, Clone, PartialEq)]
pub struct EqBlock {
    pub name: Sym,
    pub expr: Expr,
    pub lead: Option<Atom>,
}

/// Generator components, each list in declaration order of its targets.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBlock {
    pub name: Sym,
    pub xi: Vec<(Sym, Expr)>,
    pub eta: Vec<(Sym, Expr)>,
}

/// v components in dependent declaration order, one per dependent.
#[derive(Debug, Clone, PartialEq)]
pub struct SubBlock {
    pub name: Sym,
    pub comps: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelOptions {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub max_order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub indeps: Vec<Sym>,
    pub deps: Vec<Sym>,
    pub funcs: Vec<(Sym, Vec<Sym>)>,
    pub equations: Vec<EqBlock>,
    pub constraints: Vec<EqBlock>,
    pub symmetries: Vec<SymBlock>,
    pub substitutions: Vec<SubBlock>,
    pub options: ModelOptions,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<ModelFile, Diag> {
        let items = parse_model_text(text)?;
        let model = resolve(items)?;
        model.validate()?;
        Ok(model)
    }

    pub fn space(&self) -> CoreResult<JetSpace> {
        let space = JetSpace::new(self.indeps.clone(), self.deps.clone(), self.funcs.clone())?;
        Ok(match self.options.max_order {
            Some(cap) => space.with_max_order(cap),
            None => space,
        })
    }

    pub fn system(&self) -> CoreResult<DiffSystem> {
        let entries = self
            .equations
            .iter()
            .map(|e| (e.name.clone(), e.expr.clone(), e.lead.clone()))
            .collect();
        DiffSystem::new(self.space()?, entries)
    }

    /// The system's rewrite rules, extended by any constraint blocks.
    pub fn ranking(&self) -> CoreResult<Ranking> {
        let sys = self.system()?;
        if self.constraints.is_empty() {
            return solve_for_leading(&sys);
        }
        let mut entries: Vec<(Sym, Expr, Atom)> = sys
            .equations()
            .iter()
            .map(|eq| (eq.name().clone(), eq.expr().clone(), eq.lead().clone()))
            .collect();
        for c in &self.constraints {
            let lead = c.lead.clone().expect("constraint leads are checked at parse time");
            entries.push((c.name.clone(), c.expr.clone(), lead));
        }
        Ranking::build(sys.space(), entries)
    }

    pub fn generator(&self, name: &str) -> Option<Generator> {
        let block = self.symmetries.iter().find(|s| s.name.as_str() == name)?;
        let mut gen = Generator::new();
        for (i, e) in &block.xi {
            gen.set_xi(i.clone(), e.clone());
        }
        for (d, e) in &block.eta {
            gen.set_eta(d.clone(), e.clone());
        }
        Some(gen)
    }

    pub fn substitution(&self, name: &str) -> Option<CoreResult<Substitution>> {
        let block = self.substitutions.iter().find(|s| s.name.as_str() == name)?;
        let space = match self.space() {
            Ok(s) => s,
            Err(e) => return Some(Err(e)),
        };
        Some(Substitution::new(&space, block.comps.clone()))
    }

    pub fn symmetry_names(&self) -> Vec<&str> {
        self.symmetries.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn substitution_names(&self) -> Vec<&str> {
        self.substitutions.iter().map(|s| s.name.as_str()).collect()
    }

    /// Construct every derived object once, so models that cannot support
    /// the commands are rejected at parse time.
    fn validate(&self) -> Result<(), Diag> {
        let nopos = |m: String| Diag::semantic(1, 1, m);
        let space = self.space().map_err(|e| nopos(e.to_string()))?;
        self.system().map_err(|e| nopos(e.to_string()))?;
        self.ranking().map_err(|e| nopos(e.to_string()))?;
        for s in &self.symmetries {
            self.generator(s.name.as_str())
                .unwrap()
                .validate(&space)
                .map_err(|e| nopos(format!("symmetry '{}': {e}", s.name)))?;
        }
        for s in &self.substitutions {
            Substitution::new(&space, s.comps.clone())
                .map_err(|e| nopos(format!("substitution '{}': {e}", s.name)))?;
        }
        Ok(())
    }

    /// Canonical text form; reparses to an equal model.
    pub fn print(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        let names = |ns: &[Sym]| ns.iter().map(Sym::to_string).collect::<Vec<_>>().join(" ");
        line(&mut out, format!("independents {}", names(&self.indeps)));
        line(&mut out, format!("dependents {}", names(&self.deps)));
        for (f, args) in &self.funcs {
            line(&mut out, format!("arbitrary {f}({})", names(args).replace(' ', ", ")));
        }
        if let Some(seed) = self.options.seed {
            line(&mut out, format!("option seed = {seed}"));
        }
        if let Some(tol) = self.options.tol {
            line(&mut out, format!("option tol = {tol:e}"));
        }
        if let Some(cap) = self.options.max_order {
            line(&mut out, format!("option max_order = {cap}"));
        }
        let eq_line = |out: &mut String, kw: &str, e: &EqBlock| {
            let mut s = format!("{kw} {}: {} = 0", e.name, e.expr);
            if let Some(lead) = &e.lead {
                s.push_str(&format!(" lead {}", print_deriv(lead)));
            }
            out.push_str(&s);
            out.push('\n');
        };
        for e in &self.equations {
            eq_line(&mut out, "equation", e);
        }
        for c in &self.constraints {
            eq_line(&mut out, "constraint", c);
        }
        for s in &self.symmetries {
            line(&mut out, format!("symmetry {} {{", s.name));
            for (i, e) in &s.xi {
                line(&mut out, format!("    xi[{i}] = {e};"));
            }
            for (d, e) in &s.eta {
                line(&mut out, format!("    eta[{d}] = {e};"));
            }
            line(&mut out, "}".to_string());
        }
        for s in &self.substitutions {
            line(&mut out, format!("substitution {} {{", s.name));
            for (d, e) in self.deps.iter().zip(&s.comps) {
                line(&mut out, format!("    v[{d}] = {e};"));
            }
            line(&mut out, "}".to_string());
        }
        out
    }
}

/// `D[u,x,x]` form of a jet or function atom, for lead annotations.
fn print_deriv(a: &Atom) -> String {
    let (head, index) = match a {
        Atom::Jet { dep, index } => (dep, index),
        Atom::Func { name, index, .. } => (name, index),
        Atom::Indep(s) => return s.to_string(),
    };
    let mut parts = vec![head.to_string()];
    for (s, k) in index.counts() {
        for _ in 0..k {
            parts.push(s.to_string());
        }
    }
    format!("D[{}]", parts.join(","))
}

struct Decls {
    indeps: Vec<Sym>,
    deps: Vec<Sym>,
    funcs: Vec<(Sym, Vec<Sym>)>,
}

impl Decls {
    fn is_declared(&self, s: &str) -> bool {
        self.indeps.iter().any(|n| n.as_str() == s)
            || self.deps.iter().any(|n| n.as_str() == s)
            || self.funcs.iter().any(|(n, _)| n.as_str() == s)
    }

    fn func_args(&self, s: &str) -> Option<&[Sym]> {
        self.funcs.iter().find(|(n, _)| n.as_str() == s).map(|(_, a)| a.as_slice())
    }
}

fn check_declared_name(n: &Name) -> Result<(), Diag> {
    if RESERVED.contains(&n.node.as_str()) {
        return Err(Diag::semantic(n.line, n.col, format!("'{}' is a reserved word", n.node)));
    }
    if n.node.contains('_') {
        return Err(Diag::semantic(
            n.line,
            n.col,
            format!("declared name '{}' may not contain '_'", n.node),
        ));
    }
    Ok(())
}

fn resolve(items: Vec<RawItem>) -> Result<ModelFile, Diag> {
    let mut decls = Decls { indeps: Vec::new(), deps: Vec::new(), funcs: Vec::new() };
    // first pass: declarations only, so statement order is free
    for item in &items {
        let entries: Vec<(&Name, Option<&[Name]>, bool)> = match item {
            RawItem::Independents(ns) => ns.iter().map(|n| (n, None, true)).collect(),
            RawItem::Dependents(ns) => ns.iter().map(|n| (n, None, false)).collect(),
            RawItem::Arbitrary(fs) => {
                fs.iter().map(|(n, args)| (n, Some(args.as_slice()), false)).collect()
            }
            _ => continue,
        };
        for (n, args, is_indep) in entries {
            check_declared_name(n)?;
            if decls.is_declared(&n.node) {
                return Err(Diag::semantic(
                    n.line,
                    n.col,
                    format!("name '{}' declared twice", n.node),
                ));
            }
            match args {
                Some(args) => {
                    let arg_syms = args.iter().map(|a| Sym::new(&a.node)).collect();
                    decls.funcs.push((Sym::new(&n.node), arg_syms));
                }
                None if is_indep => decls.indeps.push(Sym::new(&n.node)),
                None => decls.deps.push(Sym::new(&n.node)),
            }
        }
    }
    if decls.indeps.is_empty() {
        return Err(Diag::semantic(1, 1, "no independent variables declared".to_string()));
    }
    if decls.deps.is_empty() {
        return Err(Diag::semantic(1, 1, "no dependent variables declared".to_string()));
    }
    // function arguments must be declared independents
    for item in &items {
        if let RawItem::Arbitrary(fs) = item {
            for (name, args) in fs {
                for a in args {
                    if !decls.indeps.iter().any(|n| n.as_str() == a.node) {
                        return Err(Diag::semantic(
                            a.line,
                            a.col,
                            format!(
                                "argument '{}' of '{}' is not an independent variable",
                                a.node, name.node
                            ),
                        ));
                    }
                }
            }
        }
    }

    let mut model = ModelFile {
        indeps: decls.indeps.clone(),
        deps: decls.deps.clone(),
        funcs: decls.funcs.clone(),
        equations: Vec::new(),
        constraints: Vec::new(),
        symmetries: Vec::new(),
        substitutions: Vec::new(),
        options: ModelOptions::default(),
    };

    for item in &items {
        match item {
            RawItem::Independents(_) | RawItem::Dependents(_) | RawItem::Arbitrary(_) => {}
            RawItem::Equation { name, lhs, rhs, lead }
            | RawItem::Constraint { name, lhs, rhs, lead } => {
                let is_constraint = matches!(item, RawItem::Constraint { .. });
                let taken = model
                    .equations
                    .iter()
                    .chain(model.constraints.iter())
                    .any(|e| e.name.as_str() == name.node);
                if taken {
                    return Err(Diag::semantic(
                        name.line,
                        name.col,
                        format!("equation name '{}' used twice", name.node),
                    ));
                }
                let at = (name.line, name.col);
                let expr = resolve_expr(&decls, lhs, at)? - resolve_expr(&decls, rhs, at)?;
                let lead = match lead {
                    Some(raw) => Some(resolve_lead(&decls, raw, at)?),
                    None if is_constraint => {
                        return Err(Diag::semantic(
                            name.line,
                            name.col,
                            format!("constraint '{}' needs an explicit lead", name.node),
                        ))
                    }
                    None => None,
                };
                let block = EqBlock { name: Sym::new(&name.node), expr, lead };
                if is_constraint {
                    model.constraints.push(block);
                } else {
                    model.equations.push(block);
                }
            }
            RawItem::Symmetry { name, assigns } => {
                if model.symmetries.iter().any(|s| s.name.as_str() == name.node) {
                    return Err(Diag::semantic(
                        name.line,
                        name.col,
                        format!("symmetry '{}' defined twice", name.node),
                    ));
                }
                let mut xi: Vec<(Sym, Expr)> = Vec::new();
                let mut eta: Vec<(Sym, Expr)> = Vec::new();
                for a in assigns {
                    let at = (a.target.line, a.target.col);
                    let value = resolve_expr(&decls, &a.value, at)?;
                    let target = Sym::new(&a.target.node);
                    if a.slot.node == "xi" {
                        if !decls.indeps.contains(&target) {
                            return Err(Diag::semantic(
                                a.target.line,
                                a.target.col,
                                format!("'{}' is not an independent variable", a.target.node),
                            ));
                        }
                        if xi.iter().any(|(s, _)| s == &target) {
                            return Err(Diag::semantic(
                                a.target.line,
                                a.target.col,
                                format!("xi[{}] assigned twice", a.target.node),
                            ));
                        }
                        xi.push((target, value));
                    } else {
                        if !decls.deps.contains(&target) {
                            return Err(Diag::semantic(
                                a.target.line,
                                a.target.col,
                                format!("'{}' is not a dependent variable", a.target.node),
                            ));
                        }
                        if eta.iter().any(|(s, _)| s == &target) {
                            return Err(Diag::semantic(
                                a.target.line,
                                a.target.col,
                                format!("eta[{}] assigned twice", a.target.node),
                            ));
                        }
                        eta.push((target, value));
                    }
                }
                // canonical slot order, so printing and reparsing agree
                xi.sort_by_key(|(s, _)| decls.indeps.iter().position(|n| n == s).unwrap());
                eta.sort_by_key(|(s, _)| decls.deps.iter().position(|n| n == s).unwrap());
                model.symmetries.push(SymBlock { name: Sym::new(&name.node), xi, eta });
            }
            RawItem::Substitution { name, assigns } => {
                if model.substitutions.iter().any(|s| s.name.as_str() == name.node) {
                    return Err(Diag::semantic(
                        name.line,
                        name.col,
                        format!("substitution '{}' defined twice", name.node),
                    ));
                }
                let mut comps: Vec<Option<Expr>> = vec![None; decls.deps.len()];
                for a in assigns {
                    let target = Sym::new(&a.target.node);
                    let Some(slot) = decls.deps.iter().position(|n| n == &target) else {
                        return Err(Diag::semantic(
                            a.target.line,
                            a.target.col,
                            format!("'{}' is not a dependent variable", a.target.node),
                        ));
                    };
                    if comps[slot].is_some() {
                        return Err(Diag::semantic(
                            a.target.line,
                            a.target.col,
                            format!("v[{}] assigned twice", a.target.node),
                        ));
                    }
                    let at = (a.target.line, a.target.col);
                    comps[slot] = Some(resolve_expr(&decls, &a.value, at)?);
                }
                let mut filled = Vec::with_capacity(comps.len());
                for (d, c) in decls.deps.iter().zip(comps) {
                    match c {
                        Some(e) => filled.push(e),
                        None => {
                            return Err(Diag::semantic(
                                name.line,
                                name.col,
                                format!("substitution '{}' does not assign v[{d}]", name.node),
                            ))
                        }
                    }
                }
                model
                    .substitutions
                    .push(SubBlock { name: Sym::new(&name.node), comps: filled });
            }
            RawItem::Option { name, value } => match name.node.as_str() {
                "seed" => {
                    if model.options.seed.is_some() {
                        return Err(Diag::semantic(name.line, name.col, "option 'seed' set twice"));
                    }
                    let RawValue::Int(n) = value else {
                        return Err(Diag::semantic(name.line, name.col, "seed must be an integer"));
                    };
                    if *n < 0 {
                        return Err(Diag::semantic(name.line, name.col, "seed must be nonnegative"));
                    }
                    model.options.seed = Some(*n as u64);
                }
                "tol" => {
                    if model.options.tol.is_some() {
                        return Err(Diag::semantic(name.line, name.col, "option 'tol' set twice"));
                    }
                    let v = match value {
                        RawValue::Int(n) => *n as f64,
                        RawValue::Float(v, _) => *v,
                    };
                    if !(v > 0.0) {
                        return Err(Diag::semantic(name.line, name.col, "tol must be positive"));
                    }
                    model.options.tol = Some(v);
                }
                "max_order" => {
                    if model.options.max_order.is_some() {
                        return Err(Diag::semantic(
                            name.line,
                            name.col,
                            "option 'max_order' set twice",
                        ));
                    }
                    let RawValue::Int(n) = value else {
                        return Err(Diag::semantic(
                            name.line,
                            name.col,
                            "max_order must be an integer",
                        ));
                    };
                    if *n < 1 {
                        return Err(Diag::semantic(name.line, name.col, "max_order must be at least 1"));
                    }
                    model.options.max_order = Some(*n as usize);
                }
                other => {
                    return Err(Diag::semantic(
                        name.line,
                        name.col,
                        format!("unknown option '{other}' (expected seed, tol, max_order)"),
                    ))
                }
            },
        }
    }
    Ok(model)
}

/// Resolve an expression parsed standalone (the `--expr` flag) against a
/// model's declarations.
pub fn resolve_in_model(model: &ModelFile, raw: &RawExpr) -> Result<Expr, Diag> {
    let decls = Decls {
        indeps: model.indeps.clone(),
        deps: model.deps.clone(),
        funcs: model.funcs.clone(),
    };
    resolve_expr(&decls, raw, (1, 1))
}

fn resolve_expr(decls: &Decls, raw: &RawExpr, at: (usize, usize)) -> Result<Expr, Diag> {
    match raw {
        RawExpr::Int(n) => Ok(Expr::int(*n)),
        RawExpr::Name { text, primes } => {
            Ok(Expr::from_atom(resolve_name(decls, text, *primes)?))
        }
        RawExpr::Deriv { head, dirs } => Ok(Expr::from_atom(resolve_deriv(decls, head, dirs)?)),
        RawExpr::Neg(e) => Ok(-resolve_expr(decls, e, at)?),
        RawExpr::Add(a, b) => Ok(resolve_expr(decls, a, at)? + resolve_expr(decls, b, at)?),
        RawExpr::Sub(a, b) => Ok(resolve_expr(decls, a, at)? - resolve_expr(decls, b, at)?),
        RawExpr::Mul(a, b) => Ok(resolve_expr(decls, a, at)? * resolve_expr(decls, b, at)?),
        RawExpr::Div(a, b) => {
            let a = resolve_expr(decls, a, at)?;
            let b = resolve_expr(decls, b, at)?;
            a.try_div(&b).map_err(|_| Diag::semantic(at.0, at.1, "division by zero"))
        }
        RawExpr::Pow(base, k) => {
            let base = resolve_expr(decls, base, at)?;
            let k = i32::try_from(*k)
                .map_err(|_| Diag::semantic(at.0, at.1, "exponent out of range"))?;
            base.pow(k)
                .map_err(|e| Diag::semantic(at.0, at.1, e.to_string()))
        }
    }
}

fn resolve_name(decls: &Decls, text: &Name, primes: usize) -> Result<Atom, Diag> {
    let s = text.node.as_str();
    if primes > 0 {
        let Some(args) = decls.func_args(s) else {
            return Err(Diag::semantic(
                text.line,
                text.col,
                format!("'{s}' is not an arbitrary function"),
            ));
        };
        if args.len() != 1 {
            return Err(Diag::semantic(
                text.line,
                text.col,
                format!("primes need a single-argument function; '{s}' takes {}", args.len()),
            ));
        }
        let index = MultiIndex::new(vec![args[0].clone(); primes]);
        return Ok(Atom::func(s, args.to_vec(), index));
    }
    if decls.indeps.iter().any(|n| n.as_str() == s) {
        return Ok(Atom::indep(s));
    }
    if decls.deps.iter().any(|n| n.as_str() == s) {
        return Ok(Atom::dep(s));
    }
    if let Some(args) = decls.func_args(s) {
        return Ok(Atom::func(s, args.to_vec(), MultiIndex::empty()));
    }
    if let Some((base, suffix)) = s.split_once('_') {
        if decls.deps.iter().any(|n| n.as_str() == base) {
            let Some(index) = segment(suffix, &decls.indeps) else {
                return Err(Diag::semantic(
                    text.line,
                    text.col,
                    format!("cannot read the derivative suffix '{suffix}' of '{s}'"),
                ));
            };
            return Ok(Atom::jet(base, MultiIndex::new(index)));
        }
        if let Some(args) = decls.func_args(base) {
            let owned: Vec<Sym> = args.to_vec();
            let Some(index) = segment(suffix, &owned) else {
                return Err(Diag::semantic(
                    text.line,
                    text.col,
                    format!("cannot read the derivative suffix '{suffix}' of '{s}'"),
                ));
            };
            return Ok(Atom::func(base, owned, MultiIndex::new(index)));
        }
    }
    Err(Diag::semantic(text.line, text.col, format!("unknown identifier '{s}'")))
}

fn resolve_deriv(decls: &Decls, head: &Name, dirs: &[Name]) -> Result<Atom, Diag> {
    let h = head.node.as_str();
    if decls.deps.iter().any(|n| n.as_str() == h) {
        let mut index = Vec::with_capacity(dirs.len());
        for d in dirs {
            if !decls.indeps.iter().any(|n| n.as_str() == d.node) {
                return Err(Diag::semantic(
                    d.line,
                    d.col,
                    format!("'{}' is not an independent variable", d.node),
                ));
            }
            index.push(Sym::new(&d.node));
        }
        return Ok(Atom::jet(h, MultiIndex::new(index)));
    }
    if let Some(args) = decls.func_args(h) {
        let mut index = Vec::with_capacity(dirs.len());
        for d in dirs {
            if !args.iter().any(|a| a.as_str() == d.node) {
                return Err(Diag::semantic(
                    d.line,
                    d.col,
                    format!("'{}' is not an argument of '{h}'", d.node),
                ));
            }
            index.push(Sym::new(&d.node));
        }
        return Ok(Atom::func(h, args.to_vec(), MultiIndex::new(index)));
    }
    Err(Diag::semantic(
        head.line,
        head.col,
        format!("'{h}' is not a dependent variable or arbitrary function"),
    ))
}

fn resolve_lead(decls: &Decls, raw: &RawExpr, at: (usize, usize)) -> Result<Atom, Diag> {
    let atom = match raw {
        RawExpr::Deriv { head, dirs } => resolve_deriv(decls, head, dirs)?,
        RawExpr::Name { text, primes } => resolve_name(decls, text, *primes)?,
        _ => {
            return Err(Diag::semantic(
                at.0,
                at.1,
                "lead must be a derivative like D[u,t]".to_string(),
            ))
        }
    };
    match &atom {
        Atom::Indep(_) => Err(Diag::semantic(
            at.0,
            at.1,
            "lead must be a derivative, not an independent variable".to_string(),
        )),
        Atom::Jet { index, .. } | Atom::Func { index, .. } if index.is_empty() => Err(
            Diag::semantic(at.0, at.1, "lead must be a proper derivative".to_string()),
        ),
        _ => Ok(atom),
    }
}

/// Split a derivative suffix into declared names, longest candidates first,
/// backtracking so `u_xy` works whether or not `xy` itself is a name.
fn segment(suffix: &str, names: &[Sym]) -> Option<Vec<Sym>> {
    if suffix.is_empty() {
        return Some(Vec::new());
    }
    let mut sorted: Vec<&Sym> = names.iter().collect();
    sorted.sort_by_key(|s| std::cmp::Reverse(s.as_str().len()));
    for n in sorted {
        if let Some(rest) = suffix.strip_prefix(n.as_str()) {
            if let Some(mut tail) = segment(rest, names) {
                tail.insert(0, n.clone());
                return Some(tail);
            }
        }
    }
    None
}
