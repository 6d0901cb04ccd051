//! `qpreserve`: batch front end for the entropy-preservation analyses.
//!
//! Every subcommand prints one JSON object `{status, report, diagnostics,
//! tolerances}` and exits 0 (ok), 1 (a checked property is false) or 2 (bad
//! input or unmet precondition). `gen` without `--out` prints the generated
//! object itself.

mod commands;
mod result;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qpreserve::io::to_json_string;
use qpreserve::ToleranceConfig;

use commands::{GenKind, GenParams};
use result::{CommandResult, Status};

#[derive(Debug, Parser)]
#[command(name = "qpreserve", version, about = "Entropy preservation checks for quantum channels")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TolArgs {
    /// Entropy equality and stochasticity tolerance.
    #[arg(long, global = true, env = "TOL_EQ")]
    tol_eq: Option<f64>,
    /// Fixed-point residual tolerance.
    #[arg(long, global = true, env = "TOL_FIX")]
    tol_fix: Option<f64>,
    /// Positivity and support threshold.
    #[arg(long, global = true, env = "TOL_PSD")]
    tol_psd: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> qpreserve::Result<ToleranceConfig> {
        let mut tol = ToleranceConfig::default();
        if let Some(eq) = self.tol_eq {
            tol = tol.with_eq(eq);
        }
        if let Some(fix) = self.tol_fix {
            tol = tol.with_fix(fix);
        }
        if let Some(psd) = self.tol_psd {
            tol = tol.with_psd(psd);
        }
        tol.validate()?;
        Ok(tol)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy, spectrum and rank of a state.
    AnalyzeState { state: PathBuf },
    /// Compare S(Φρ) = S(ρ) with Φ†Φ(ρ) = ρ for a bistochastic channel.
    AnalyzePair { channel: PathBuf, state: PathBuf },
    /// Block structure of the fixed-point algebra of Φ†Φ.
    Decompose {
        channel: PathBuf,
        /// Also verify the structure against this state.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Map entropy of one channel, or compare S^map(Φ∘Ψ) with S^map(Ψ) for `PHI PSI`.
    MapEntropy {
        channel: PathBuf,
        inner: Option<PathBuf>,
    },
    /// Check H(Bp) = H(p) against BᵀBp = p for every (B, p) in a CSV or JSON batch.
    ClassicalCheck { batch: PathBuf },
    /// Write a preserving (channel, state, structure) triple for a block spec.
    Synthesize {
        /// Blocks as `dLxdR`, comma separated, e.g. `2x1,1x2`.
        #[arg(long)]
        spec: String,
        /// Block weights, comma separated; uniform when omitted.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate a random object in its file format.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank of a generated state (full rank when omitted).
        #[arg(long)]
        rank: Option<usize>,
        /// Unitaries, environment dimension or permutations, depending on the kind.
        #[arg(long, default_value_t = 2)]
        terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(command: Command, tol: &ToleranceConfig) -> qpreserve::Result<CommandResult> {
    match command {
        Command::AnalyzeState { state } => commands::analyze_state(&state, tol),
        Command::AnalyzePair { channel, state } => commands::analyze_pair(&channel, &state, tol),
        Command::Decompose {
            channel,
            state,
            seed,
        } => commands::decompose(&channel, state.as_deref(), seed, tol),
        Command::MapEntropy { channel, inner } => {
            commands::map_entropy_cmd(&channel, inner.as_deref(), tol)
        }
        Command::ClassicalCheck { batch } => commands::classical_check(&batch, tol),
        Command::Synthesize {
            spec,
            weights,
            seed,
            out_dir,
        } => commands::synthesize(&spec, weights.as_deref(), seed, &out_dir, tol),
        Command::Gen { .. } => unreachable!("handled before dispatch"),
    }
}

fn emit(result: &CommandResult) -> ExitCode {
    match to_json_string(result) {
        Ok(text) => println!("{text}"),
        Err(e) => eprintln!("{e}"),
    }
    ExitCode::from(result.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match cli.tol.resolve() {
        Ok(t) => t,
        Err(e) => return emit(&CommandResult::error(&e, &ToleranceConfig::default())),
    };
    if let Command::Gen {
        kind,
        dim,
        seed,
        rank,
        terms,
        out,
    } = cli.command
    {
        let params = GenParams {
            dim,
            seed,
            rank,
            terms,
        };
        let result = match out {
            Some(path) => commands::gen(kind, params, &path, &tol),
            None => match commands::generate(kind, params, &tol).and_then(|v| to_json_string(&v)) {
                Ok(text) => {
                    println!("{text}");
                    return ExitCode::from(Status::Ok.exit_code());
                }
                Err(e) => Err(e),
            },
        };
        return emit(&result.unwrap_or_else(|e| CommandResult::error(&e, &tol)));
    }
    let result = run(cli.command, &tol).unwrap_or_else(|e| CommandResult::error(&e, &tol));
    emit(&result)
}
