//! Command implementations. Each returns the full report text plus a
//! verdict; `main` maps failed verdicts to exit code 1 and usage problems
//! to exit code 2. All report lines go through the expression printer, so
//! anything shown can be fed back in.

use std::fmt::Write as _;

use adjflux_core::adjoint::{
    adjoint_system, check_substitution, find_substitution, formal_lagrangian, multiplier_form,
    AnsatzSpec, SelfAdjointnessReport,
};
use adjflux_core::conslaw::{
    conserved_vector, conserved_vector_unchecked, strip_trivial, verify,
};
use adjflux_core::expr::{Atom, Expr, MultiIndex, Sym};
use adjflux_core::manifold::{reduce, Certificate};
use adjflux_core::numeric::{NumericConfig, DEFAULT_SEED, DEFAULT_TOL};
use adjflux_core::system::Substitution;
use adjflux_core::CoreError;

use crate::model::ModelFile;
use crate::parse::parse_expr_text;

#[derive(Debug)]
pub enum CmdError {
    /// Bad invocation: unknown names, malformed flags. Exit 2.
    Usage(String),
    /// The mathematics failed or refused. Exit 1.
    Math(String),
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> CmdError {
        CmdError::Math(e.to_string())
    }
}

pub struct Outcome {
    pub text: String,
    /// False turns into exit code 1: the command ran but the answer is "no".
    pub ok: bool,
}

fn report(text: String, ok: bool) -> Result<Outcome, CmdError> {
    Ok(Outcome { text, ok })
}

/// Numeric settings with flags folded over model options: flag beats env
/// beats `option seed` beats the default.
pub fn numeric_config(
    model: &ModelFile,
    seed_flag: Option<u64>,
    tol_flag: Option<f64>,
) -> Result<NumericConfig, CmdError> {
    let env_seed = match std::env::var("ADJFLUX_SEED") {
        Ok(s) => Some(s.parse::<u64>().map_err(|_| {
            CmdError::Usage(format!("ADJFLUX_SEED is not an unsigned integer: '{s}'"))
        })?),
        Err(_) => None,
    };
    Ok(NumericConfig {
        seed: seed_flag.or(env_seed).or(model.options.seed).unwrap_or(DEFAULT_SEED),
        tol: tol_flag.or(model.options.tol).unwrap_or(DEFAULT_TOL),
        ..NumericConfig::default()
    })
}

fn lookup_generator(model: &ModelFile, name: &str) -> Result<adjflux_core::jet::Generator, CmdError> {
    model.generator(name).ok_or_else(|| {
        CmdError::Usage(format!(
            "no symmetry named '{name}' (model defines: {})",
            join_or_none(&model.symmetry_names())
        ))
    })
}

fn lookup_substitution(model: &ModelFile, name: &str) -> Result<Substitution, CmdError> {
    let found = model.substitution(name).ok_or_else(|| {
        CmdError::Usage(format!(
            "no substitution named '{name}' (model defines: {})",
            join_or_none(&model.substitution_names())
        ))
    })?;
    Ok(found?)
}

fn join_or_none(names: &[&str]) -> String {
    if names.is_empty() {
        "none".to_string()
    } else {
        names.join(", ")
    }
}

/// `F` or `D[F,x,x]`: how certificate keys against an equation and its
/// prolongations are shown.
fn key_label(name: &Sym, index: &MultiIndex) -> String {
    if index.is_empty() {
        return name.to_string();
    }
    let mut parts = vec![name.to_string()];
    for (s, k) in index.counts() {
        for _ in 0..k {
            parts.push(s.to_string());
        }
    }
    format!("D[{}]", parts.join(","))
}

fn push_certificate(out: &mut String, cert: &Certificate) {
    for ((name, index), q) in cert {
        if !q.is_zero() {
            writeln!(out, "certificate[{}] = {q}", key_label(name, index)).unwrap();
        }
    }
}

pub fn adjoint(model: &ModelFile) -> Result<Outcome, CmdError> {
    let sys = model.system()?;
    let adj = adjoint_system(&sys)?;
    let mut out = String::new();
    writeln!(out, "L = {}", formal_lagrangian(&sys)).unwrap();
    for (src, e) in adj.equations() {
        writeln!(out, "adjoint of {src}: {e} = 0").unwrap();
    }
    report(out, true)
}

fn push_substitution(out: &mut String, model: &ModelFile, sub: &Substitution) {
    for (d, e) in model.deps.iter().zip(sub.components()) {
        writeln!(out, "v[{d}] = {e}").unwrap();
    }
}

fn push_check_report(
    out: &mut String,
    names: &[Sym],
    rep: &SelfAdjointnessReport,
) {
    writeln!(out, "class: {}", rep.class).unwrap();
    writeln!(
        out,
        "verdict: {}",
        if rep.verdict { "self-adjoint" } else { "not self-adjoint" }
    )
    .unwrap();
    for (alpha, row) in rep.lambda.iter().enumerate() {
        for (beta, q) in row.iter().enumerate() {
            writeln!(out, "lambda[{}*][{}] = {q}", names[alpha], names[beta]).unwrap();
        }
    }
    for (alpha, extra) in rep.prolonged.iter().enumerate() {
        for ((name, index), q) in extra {
            if !q.is_zero() {
                writeln!(out, "lambda[{}*][{}] = {q}", names[alpha], key_label(name, index))
                    .unwrap();
            }
        }
    }
    if !rep.verdict {
        for (alpha, r) in rep.residual.iter().enumerate() {
            if !r.is_zero() {
                writeln!(out, "residual[{}*] = {r}", names[alpha]).unwrap();
            }
        }
    }
}

pub fn selfadjoint_check(model: &ModelFile, sub_name: &str) -> Result<Outcome, CmdError> {
    let sys = model.system()?;
    let sub = lookup_substitution(model, sub_name)?;
    let rep = check_substitution(&sys, &sub)?;
    let names: Vec<Sym> = sys.equations().iter().map(|e| e.name().clone()).collect();
    let mut out = String::new();
    push_substitution(&mut out, model, &sub);
    push_check_report(&mut out, &names, &rep);
    report(out, rep.verdict)
}

pub fn parse_ansatz(s: &str) -> Result<AnsatzSpec, CmdError> {
    match s {
        "power" => Ok(AnsatzSpec::Power),
        "const" => Ok(AnsatzSpec::Const),
        _ => match s.strip_prefix("affine:").map(str::parse::<u32>) {
            Some(Ok(d)) => Ok(AnsatzSpec::Affine(d)),
            _ => Err(CmdError::Usage(format!(
                "bad ansatz '{s}' (expected power, const, or affine:<degree>)"
            ))),
        },
    }
}

pub fn selfadjoint_find(model: &ModelFile, ansatz: &str) -> Result<Outcome, CmdError> {
    let sys = model.system()?;
    let spec = parse_ansatz(ansatz)?;
    let mut out = String::new();
    match find_substitution(&sys, spec)? {
        Some(sub) => {
            push_substitution(&mut out, model, &sub);
            report(out, true)
        }
        None => {
            writeln!(out, "none").unwrap();
            report(out, false)
        }
    }
}

pub fn multiplier(model: &ModelFile, sub_name: &str) -> Result<Outcome, CmdError> {
    let sys = model.system()?;
    let sub = lookup_substitution(model, sub_name)?;
    let mform = multiplier_form(&sys, &sub)?;
    let mut out = String::new();
    for (alpha, eq) in mform.equations().iter().enumerate() {
        let u = Expr::from_atom(Atom::dep(model.deps[alpha].clone()));
        let mu = sub.components()[alpha].try_div_reduced(&u)?;
        writeln!(out, "mu[{}] = {mu}", eq.name()).unwrap();
        writeln!(out, "multiplier form {}: {} = 0", eq.name(), eq.expr()).unwrap();
    }
    let identity: Vec<Expr> =
        model.deps.iter().map(|d| Expr::from_atom(Atom::dep(d.clone()))).collect();
    let strict = Substitution::new(mform.space(), identity)?;
    let rep = check_substitution(&mform, &strict)?;
    writeln!(
        out,
        "strict self-adjointness of the multiplier form: {}",
        if rep.verdict { "passes" } else { "fails" }
    )
    .unwrap();
    report(out, rep.verdict)
}

#[allow(clippy::too_many_arguments)]
pub fn conslaw(
    model: &ModelFile,
    sym_name: &str,
    sub_name: &str,
    strip: bool,
    do_verify: bool,
    unchecked: bool,
    cfg: &NumericConfig,
) -> Result<Outcome, CmdError> {
    let sys = model.system()?;
    let ranking = model.ranking()?;
    let gen = lookup_generator(model, sym_name)?;
    let sub = lookup_substitution(model, sub_name)?;
    let cv = if unchecked {
        conserved_vector_unchecked(&sys, &gen, &sub, &ranking)
    } else {
        conserved_vector(&sys, &gen, &sub, &ranking)
    };
    let cv = cv.map_err(|e| match e {
        CoreError::SubstitutionRejected(r) => CmdError::Math(format!(
            "substitution '{sub_name}' rejected; adjoint residual on the substitution:\n{r}"
        )),
        other => CmdError::Math(other.to_string()),
    })?;
    let cv = if strip { strip_trivial(&cv)? } else { cv };
    let mut out = String::new();
    for (i, c) in model.indeps.iter().zip(cv.components()) {
        writeln!(out, "C[{i}] = {c}").unwrap();
    }
    if !do_verify {
        return report(out, true);
    }
    let rep = verify(&cv, cfg)?;
    writeln!(out, "symbolic residual: {}", rep.residual).unwrap();
    push_certificate(&mut out, &rep.certificate);
    writeln!(
        out,
        "numeric max residual: {:e} (seed {}, {} points, tol {:e})",
        rep.numeric_max, rep.seed, cfg.points, cfg.tol
    )
    .unwrap();
    writeln!(out, "verdict: {}", if rep.verdict { "conserved" } else { "not conserved" }).unwrap();
    report(out, rep.verdict)
}

pub fn reduce_expr(model: &ModelFile, expr_text: &str) -> Result<Outcome, CmdError> {
    let raw = parse_expr_text(expr_text).map_err(|d| CmdError::Usage(d.to_string()))?;
    let e = crate::model::resolve_in_model(model, &raw)
        .map_err(|d| CmdError::Usage(d.to_string()))?;
    let ranking = model.ranking()?;
    let (nf, cert) = reduce(&e, &ranking)?;
    let mut out = String::new();
    writeln!(out, "normal form: {nf}").unwrap();
    push_certificate(&mut out, &cert);
    report(out, true)
}
