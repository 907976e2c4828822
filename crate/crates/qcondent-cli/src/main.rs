//! Command-line front end: entropies, conditional-entropy and
//! mutual-information bounds, and verification sweeps over bipartite states.
//!
//! Exit codes: 0 success / all checks passed, 1 usage or parse error,
//! 2 validation error, 3 verification failures.

use clap::{Args, Parser, Subcommand};
use qcondent::io::{read_povm, read_state, IoError, PovmFile};
use qcondent::measure::conditional_entropy_given;
use qcondent::optimize::{
    maximize_mutual_information, minimize_conditional_entropy, OptimizeError,
};
use qcondent::qstate::{marginals, von_neumann_entropy};
use qcondent::verify::{fmt9, run_sweep, SweepConfig};
use qcondent::{OptimizationResult, OptimizerConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qcondent",
    about = "Conditional entropy and mutual information of bipartite quantum states under POVM measurements",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the joint and marginal entropies of a state file.
    Entropy {
        /// State file (JSON).
        state: PathBuf,
        /// Report in nats instead of bits.
        #[arg(long)]
        nats: bool,
    },
    /// Conditional entropy of A given a measurement on B: evaluate a given
    /// POVM, or optimize for an upper bound on the infimum.
    Condent {
        state: PathBuf,
        /// Evaluate this POVM file instead of optimizing.
        #[arg(long)]
        povm: Option<PathBuf>,
        /// Write the best measurement found to this POVM file.
        #[arg(long)]
        povm_out: Option<PathBuf>,
        #[arg(long)]
        nats: bool,
        #[command(flatten)]
        opt: OptFlags,
    },
    /// Lower bound on the accessible mutual information, optimizing
    /// measurements on both sides.
    Mutinfo {
        state: PathBuf,
        /// Write the best measurement pair to `<stem>.a.json` / `<stem>.b.json`.
        #[arg(long)]
        povm_out: Option<PathBuf>,
        #[arg(long)]
        nats: bool,
        #[command(flatten)]
        opt: OptFlags,
    },
    /// Run the inequality verification sweep; exits 3 on any failed check.
    Verify {
        /// Comma-separated subsystem dimensions, e.g. `2x2,2x3`.
        #[arg(long, default_value = "2x2,2x3")]
        dims: String,
        /// Number of random states.
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Also run the fixed structured suite.
        #[arg(long)]
        structured: bool,
        /// Write the machine-readable report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        opt: OptFlags,
    },
}

#[derive(Args)]
struct OptFlags {
    /// Base seed for all randomness.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Random restarts per optimization.
    #[arg(long)]
    restarts: Option<usize>,
    /// Measurement outcomes on A (default: d_A^2).
    #[arg(long)]
    outcomes_a: Option<usize>,
    /// Measurement outcomes on B (default: d_B^2).
    #[arg(long)]
    outcomes_b: Option<usize>,
    /// Objective evaluations per local search.
    #[arg(long)]
    max_evals: Option<usize>,
    /// Convergence tolerance per local search.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
}

impl OptFlags {
    fn to_config(&self, base: OptimizerConfig) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts.unwrap_or(base.restarts),
            outcomes_a: self.outcomes_a.or(base.outcomes_a),
            outcomes_b: self.outcomes_b.or(base.outcomes_b),
            max_evals: self.max_evals.unwrap_or(base.max_evals),
            tol: self.tol.unwrap_or(base.tol),
            base_seed: self.seed,
        }
    }
}

enum CliError {
    Usage(String),
    Parse(String),
    Validation(String),
    Failures(usize),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Failures(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Parse(m) => format!("parse error: {m}"),
            CliError::Validation(m) => format!("validation error: {m}"),
            CliError::Failures(n) => format!("verification failed: {n} failed checks"),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Read { .. } | IoError::Parse { .. } => CliError::Parse(e.to_string()),
            IoError::BadShape { .. } | IoError::InvalidState { .. } | IoError::InvalidPovm { .. } => {
                CliError::Validation(e.to_string())
            }
        }
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn unit_name(nats: bool) -> &'static str {
    if nats {
        "nats"
    } else {
        "bits"
    }
}

fn in_unit(bits: f64, nats: bool) -> f64 {
    if nats {
        bits * std::f64::consts::LN_2
    } else {
        bits
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Entropy { state, nats } => {
            let rho = read_state(&state)?;
            let (rho_a, rho_b) = marginals(&rho).map_err(|e| CliError::Validation(e.to_string()))?;
            let u = unit_name(nats);
            println!("H(A,B) = {} {u}", fmt9(in_unit(von_neumann_entropy(&rho), nats)));
            println!("H(A) = {} {u}", fmt9(in_unit(von_neumann_entropy(&rho_a), nats)));
            println!("H(B) = {} {u}", fmt9(in_unit(von_neumann_entropy(&rho_b), nats)));
            Ok(())
        }
        Cmd::Condent {
            state,
            povm,
            povm_out,
            nats,
            opt,
        } => {
            let rho = read_state(&state)?;
            let u = unit_name(nats);
            match povm {
                Some(path) => {
                    let povm = read_povm(&path)?;
                    let h = conditional_entropy_given(&rho, &povm)
                        .map_err(|e| CliError::Validation(e.to_string()))?;
                    println!("H(A|beta) = {} {u}", fmt9(in_unit(h, nats)));
                }
                None => {
                    let cfg = opt.to_config(OptimizerConfig::default());
                    let res = minimize_conditional_entropy(&rho, &cfg)?;
                    println!("H(A|B) <= {} {u}", fmt9(in_unit(res.value, nats)));
                    print_restart_stats(&res);
                    if let Some(out) = povm_out {
                        PovmFile::from_povm(&res.best_povm_b)
                            .write(&out)
                            .map_err(CliError::from)?;
                    }
                }
            }
            Ok(())
        }
        Cmd::Mutinfo {
            state,
            povm_out,
            nats,
            opt,
        } => {
            let rho = read_state(&state)?;
            let u = unit_name(nats);
            let cfg = opt.to_config(OptimizerConfig::default());
            let res = maximize_mutual_information(&rho, &cfg)?;
            let h_cond = conditional_entropy_given(&rho, &res.best_povm_b)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let (rho_a, _) = marginals(&rho).map_err(|e| CliError::Validation(e.to_string()))?;
            let cap = von_neumann_entropy(&rho_a) - h_cond;
            println!("I(A;B) >= {} {u}", fmt9(in_unit(res.value, nats)));
            println!("cap H(A) - H(A|beta_best) = {} {u}", fmt9(in_unit(cap, nats)));
            print_restart_stats(&res);
            if let Some(out) = povm_out {
                let povm_a = res.best_povm_a.as_ref().expect("joint optimization sets A");
                PovmFile::from_povm(povm_a)
                    .write(sibling_path(&out, "a"))
                    .map_err(CliError::from)?;
                PovmFile::from_povm(&res.best_povm_b)
                    .write(sibling_path(&out, "b"))
                    .map_err(CliError::from)?;
            }
            Ok(())
        }
        Cmd::Verify {
            dims,
            count,
            structured,
            report,
            opt,
        } => {
            let dims = parse_dims(&dims)?;
            let base = SweepConfig::default();
            let cfg = SweepConfig {
                dims,
                count,
                seed: opt.seed,
                structured,
                optimizer: opt.to_config(base.optimizer),
            };
            let outcome = run_sweep(&cfg).map_err(|e| match e {
                qcondent::VerifyError::InvalidConfig(m) => CliError::Usage(m),
                qcondent::VerifyError::Optimize(OptimizeError::InvalidConfig(m)) => {
                    CliError::Usage(m)
                }
                other => CliError::Validation(other.to_string()),
            })?;
            print!("{}", outcome.summary_table());
            if let Some(path) = report {
                std::fs::write(&path, outcome.machine_report()).map_err(|e| {
                    CliError::Validation(format!("{}: {e}", path.display()))
                })?;
            }
            if outcome.summary.failures > 0 {
                return Err(CliError::Failures(outcome.summary.failures));
            }
            Ok(())
        }
    }
}

fn print_restart_stats(res: &OptimizationResult) {
    // First index achieving the bound, matching the stored measurement.
    let mut best = 0;
    for (i, &v) in res.per_restart_values.iter().enumerate() {
        let better = match res.bound_kind {
            qcondent::BoundKind::UpperForInfimum => v < res.per_restart_values[best],
            qcondent::BoundKind::LowerForSupremum => v > res.per_restart_values[best],
        };
        if better {
            best = i;
        }
    }
    let min = res.per_restart_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = res
        .per_restart_values
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    println!("restarts run = {}", res.restarts_run);
    println!("best start index = {best}");
    println!("restart values: min = {}, max = {}", fmt9(min), fmt9(max));
}

/// `out.json` with tag `a` becomes `out.a.json`.
fn sibling_path(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("povm");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("json");
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn parse_dims(spec: &str) -> Result<Vec<(usize, usize)>, CliError> {
    let mut dims = Vec::new();
    for part in spec.split(',') {
        let (a, b) = part
            .trim()
            .split_once('x')
            .ok_or_else(|| CliError::Usage(format!("bad dims entry `{part}`, expected e.g. 2x2")))?;
        let d_a: usize = a
            .parse()
            .map_err(|_| CliError::Usage(format!("bad dimension `{a}`")))?;
        let d_b: usize = b
            .parse()
            .map_err(|_| CliError::Usage(format!("bad dimension `{b}`")))?;
        dims.push((d_a, d_b));
    }
    if dims.is_empty() {
        return Err(CliError::Usage("dims must be nonempty".into()));
    }
    Ok(dims)
}
