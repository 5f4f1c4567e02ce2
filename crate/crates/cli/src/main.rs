use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use adjflux_cli::cmd::{self, CmdError, Outcome};
use adjflux_cli::model::ModelFile;

#[derive(Parser)]
#[command(name = "adjflux", version, about = "Formal Lagrangians, adjoint systems, and conservation laws for PDE models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for numeric verification; falls back to ADJFLUX_SEED, then the
    /// model's `option seed`
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tolerance for numeric verification
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Jet order cap, overriding the model's `option max_order`
    #[arg(long, global = true)]
    max_order: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the formal Lagrangian and the adjoint system
    Adjoint { model: PathBuf },
    /// Test or search substitutions that make the system self-adjoint
    Selfadjoint {
        #[command(subcommand)]
        which: SelfAdjoint,
    },
    /// Rewrite a scalar equation as mu*F = 0 and test it strictly
    Multiplier {
        model: PathBuf,
        /// Substitution block supplying v = phi
        #[arg(long)]
        sub: String,
    },
    /// Build the conserved vector of a symmetry under a substitution
    Conslaw {
        model: PathBuf,
        /// Symmetry block to use
        #[arg(long)]
        sym: String,
        /// Substitution block eliminating the adjoint variables
        #[arg(long)]
        sub: String,
        /// Remove trivially conserved pieces before reporting
        #[arg(long)]
        strip: bool,
        /// Check the divergence symbolically and numerically
        #[arg(long)]
        verify: bool,
        /// Skip the self-adjointness gate on the substitution
        #[arg(long)]
        unchecked: bool,
    },
    /// Reduce an expression to normal form on the solution manifold
    Reduce {
        model: PathBuf,
        /// Expression in the model's variables
        #[arg(long)]
        expr: String,
    },
}

#[derive(Subcommand)]
enum SelfAdjoint {
    /// Substitute one named block into the adjoint system
    Check {
        model: PathBuf,
        /// Substitution block to test
        #[arg(long)]
        sub: String,
    },
    /// Search a template family for a working substitution
    Find {
        model: PathBuf,
        /// power, const, or affine:<degree>
        #[arg(long)]
        ansatz: String,
    },
}

fn load_model(path: &Path, max_order: Option<usize>) -> Result<ModelFile, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut model = ModelFile::parse(&text)
        .map_err(|d| CmdError::Usage(format!("{}: {d}", path.display())))?;
    if max_order.is_some() {
        model.options.max_order = max_order;
    }
    Ok(model)
}

fn dispatch(cli: &Cli) -> Result<Outcome, CmdError> {
    let cap = cli.max_order;
    match &cli.command {
        Command::Adjoint { model } => cmd::adjoint(&load_model(model, cap)?),
        Command::Selfadjoint { which } => match which {
            SelfAdjoint::Check { model, sub } => {
                cmd::selfadjoint_check(&load_model(model, cap)?, sub)
            }
            SelfAdjoint::Find { model, ansatz } => {
                cmd::selfadjoint_find(&load_model(model, cap)?, ansatz)
            }
        },
        Command::Multiplier { model, sub } => cmd::multiplier(&load_model(model, cap)?, sub),
        Command::Conslaw { model, sym, sub, strip, verify, unchecked } => {
            let model = load_model(model, cap)?;
            let cfg = cmd::numeric_config(&model, cli.seed, cli.tol)?;
            cmd::conslaw(&model, sym, sub, *strip, *verify, *unchecked, &cfg)
        }
        Command::Reduce { model, expr } => cmd::reduce_expr(&load_model(model, cap)?, expr),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CmdError::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
