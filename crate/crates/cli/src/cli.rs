//! Subcommand definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use symext_core::analysis::{
    distill_search, key_bound, locking_demo, werner_scan, DistillMode,
};
use symext_core::bsa::{distance_to_extendible_set, lambda_max};
use symext_core::extendibility::two_qubit_extendible_analytic;
use symext_core::linalg::DensityMatrix;
use symext_core::rng::{trial_rng, RngExt};
use symext_core::statezoo;

use crate::report::*;
use crate::stateio;
use crate::{exit_code, CliError};

#[derive(Parser)]
#[command(
    name = "symext",
    version,
    about = "Symmetric-extendibility certification for bipartite quantum states",
    long_about = "Certifies k-extendibility of bipartite quantum states with a dense SDP \
                  solver, computes best symmetric-extendible decompositions and derived \
                  one-way monotones, scans the Werner family, searches for one-way \
                  distillability over filtered state pairs, and evaluates secret-key \
                  continuity bounds.\n\nDefault tolerances: SDP duality gap 1e-6, constraint \
                  residual 1e-7, feasibility margin threshold 1e-6."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Construct a state from one of the built-in families.
    State(StateArgs),
    /// Decide k-extendibility of a state file.
    CheckExt(CheckArgs),
    /// Best symmetric-extendible decomposition of a state file.
    Bsa(BsaArgs),
    /// Trace distance to the symmetric-extendible set.
    DistanceSe(DistanceArgs),
    /// Classify the Werner family over an alpha grid (CSV by default).
    WernerScan(ScanArgs),
    /// Randomized two-copy filtering search for positive coherent information.
    DistillSearch(DistillArgs),
    /// Secret-key continuity bound from a trace distance or a state file.
    KeyBound(KeyBoundArgs),
    /// Extendibility locking demonstration: verdicts before and after
    /// dephasing the A-side flag.
    LockingDemo(LockingArgs),
    /// Run the certification self-test suite.
    Selftest(SelftestArgs),
}

#[derive(Args)]
pub struct StateArgs {
    #[command(subcommand)]
    pub family: StateFamily,
}

#[derive(Subcommand)]
pub enum StateFamily {
    /// Werner state (I + alpha P) / (d^2 + alpha d).
    Werner {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// W-state-marginal family on two qubits.
    UpsilonN {
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Perturbed decohered locking state.
    UpsilonEps {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        eps: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Maximally entangled state on C^d (x) C^d.
    MaxEntangled {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Locking state with flag qubits; c defaults to sqrt(d).
    Locking {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        c: Option<f64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Decohered locking state on C^d (x) C^d.
    DecoheredLocking {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Private (twisted-singlet) state with random qubit shield data.
    Private {
        /// Seed for the shield state and twisting unitary.
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Projector onto the W state; first factor is A.
    W {
        #[arg(long, default_value_t = 3)]
        parties: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Projector onto the GHZ state; first factor is A.
    Ghz {
        #[arg(long, default_value_t = 3)]
        parties: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
pub struct CheckArgs {
    pub state: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Use the closed-form two-qubit condition instead of the SDP.
    #[arg(long)]
    pub analytic: bool,
    /// Force the full-space SDP formulation also at k = 1.
    #[arg(long)]
    pub general: bool,
    /// Attach the extension witness to the JSON output.
    #[arg(long)]
    pub witness: bool,
    /// Override the SDP duality-gap tolerance (default 1e-8 here).
    #[arg(long)]
    pub gap_tol: Option<f64>,
    /// Override the SDP residual tolerance (default 1e-9 here).
    #[arg(long)]
    pub residual_tol: Option<f64>,
    /// Override the SDP iteration cap (default 200).
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Dump interior-point iterates of the full-space margin program as CSV
    /// (iteration, gap, residual).
    #[arg(long)]
    pub sdp_trace: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct BsaArgs {
    pub state: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Embed the component states in the JSON output.
    #[arg(long)]
    pub states: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct DistanceArgs {
    pub state: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ScanFormat {
    Csv,
    Json,
}

#[derive(Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_max: f64,
    #[arg(long)]
    pub step: f64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = ScanFormat::Csv)]
    pub format: ScanFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Full,
    Proj2,
}

#[derive(Args)]
pub struct DistillArgs {
    pub state: PathBuf,
    #[arg(long)]
    pub trials: usize,
    /// Seed for the trial generators (mandatory: runs are reproducible).
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    pub mode: ModeArg,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct KeyBoundArgs {
    /// Trace distance to the nearest extendible state.
    #[arg(long, conflicts_with = "state")]
    pub eps: Option<f64>,
    #[arg(long, requires = "eps", default_value_t = 2)]
    pub da: usize,
    /// Compute the distance for this state first, then bound its key rate.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct LockingArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SelftestArgs {
    /// Comma-separated criterion indices to run (default: all).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(CliError::from),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load(path: &PathBuf) -> Result<DensityMatrix, CliError> {
    stateio::read_state(path)
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::State(args) => run_state(args),
        Command::CheckExt(args) => run_check(args),
        Command::Bsa(args) => run_bsa(args),
        Command::DistanceSe(args) => run_distance(args),
        Command::WernerScan(args) => run_scan(args),
        Command::DistillSearch(args) => run_distill(args),
        Command::KeyBound(args) => run_key_bound(args),
        Command::LockingDemo(args) => run_locking(args),
        Command::Selftest(args) => run_selftest(args),
    }
}

fn run_state(args: StateArgs) -> Result<i32, CliError> {
    let (rho, output) = match args.family {
        StateFamily::Werner { d, alpha, output } => (statezoo::werner(d, alpha)?, output),
        StateFamily::UpsilonN { n, output } => {
            if n == 0 {
                return Err(CliError::validation("n must be at least 1"));
            }
            (statezoo::upsilon_n(n), output)
        }
        StateFamily::UpsilonEps { d, eps, output } => (statezoo::upsilon_eps(d, eps)?, output),
        StateFamily::MaxEntangled { d, output } => {
            if d < 2 {
                return Err(CliError::validation("d must be at least 2"));
            }
            (statezoo::max_entangled(d), output)
        }
        StateFamily::Locking { d, c, output } => {
            let c = c.unwrap_or_else(|| (d as f64).sqrt());
            (
                statezoo::locking_state(statezoo::LockingStateParams { d, c })?,
                output,
            )
        }
        StateFamily::DecoheredLocking { d, output } => {
            if d < 2 {
                return Err(CliError::validation("d must be at least 2"));
            }
            (statezoo::decohered_locking_state(d), output)
        }
        StateFamily::Private { seed, output } => {
            let mut rng = trial_rng(seed, 0);
            let sigma = rng.density(symext_core::linalg::DimensionProfile::bipartite(2, 2));
            let u1 = rng.haar_unitary(4);
            (
                statezoo::private_state(
                    &sigma,
                    &symext_core::linalg::ComplexMatrix::identity(4),
                    &u1,
                )?,
                output,
            )
        }
        StateFamily::W { parties, output } => {
            if parties < 2 {
                return Err(CliError::validation("need at least 2 parties"));
            }
            (
                statezoo::qubit_register_state(&statezoo::w_state(parties), parties),
                output,
            )
        }
        StateFamily::Ghz { parties, output } => {
            if parties < 2 {
                return Err(CliError::validation("need at least 2 parties"));
            }
            (
                statezoo::qubit_register_state(&statezoo::ghz_state(parties), parties),
                output,
            )
        }
    };
    stateio::write_state(&output, &rho)?;
    Ok(exit_code::OK)
}

fn run_check(args: CheckArgs) -> Result<i32, CliError> {
    let rho = load(&args.state)?;
    let tuned = args.gap_tol.is_some() || args.residual_tol.is_some() || args.max_iter.is_some();
    let config = symext_core::sdp::SdpConfig {
        gap_tol: args.gap_tol.unwrap_or(1e-8),
        residual_tol: args.residual_tol.unwrap_or(1e-9),
        max_iter: args.max_iter.unwrap_or(200),
        ..symext_core::sdp::SdpConfig::default()
    };
    let verdict = if args.analytic {
        if args.k != 1 {
            return Err(CliError::validation(
                "the analytic condition covers k = 1 only",
            ));
        }
        two_qubit_extendible_analytic(&rho)?
    } else if tuned {
        symext_core::extendibility::is_k_extendible_tuned(&rho, args.k, args.general, &config)?
    } else {
        symext_core::extendibility::is_k_extendible_with(&rho, args.k, args.general)?
    };
    if let Some(trace_path) = &args.sdp_trace {
        let (sides, constraints) =
            symext_core::extendibility::extension_feasibility_constraints(&rho, args.k)?;
        let trace_config = symext_core::sdp::SdpConfig {
            record_trace: true,
            ..config
        };
        let sol =
            symext_core::sdp::feasibility_margin_solution(&sides, &constraints, &trace_config)?;
        let mut csv = String::from("iteration,gap,residual");
        for (iter, gap, residual) in &sol.trace {
            csv.push_str(&format!("\n{iter},{gap},{residual}"));
        }
        std::fs::write(trace_path, csv)?;
    }
    let json = serde_json::to_string_pretty(&VerdictJson::new(&verdict, args.witness))?;
    emit(args.output.as_ref(), &json)?;
    Ok(exit_code::OK)
}

fn run_bsa(args: BsaArgs) -> Result<i32, CliError> {
    let rho = load(&args.state)?;
    let decomposition = lambda_max(&rho, args.k)?;
    let json = serde_json::to_string_pretty(&BsaJson::new(&decomposition, args.states))?;
    emit(args.output.as_ref(), &json)?;
    Ok(exit_code::OK)
}

fn run_distance(args: DistanceArgs) -> Result<i32, CliError> {
    let rho = load(&args.state)?;
    let (epsilon, nearest) = distance_to_extendible_set(&rho, args.k)?;
    let json = serde_json::to_string_pretty(&DistanceJson {
        epsilon,
        nearest: stateio::to_state_file(&nearest),
    })?;
    emit(args.output.as_ref(), &json)?;
    Ok(exit_code::OK)
}

fn run_scan(args: ScanArgs) -> Result<i32, CliError> {
    let rows = werner_scan(args.d, args.alpha_min, args.alpha_max, args.step, args.k)?;
    let text = match args.format {
        ScanFormat::Csv => {
            let mut out = String::from(SCAN_CSV_HEADER);
            for row in &rows {
                out.push('\n');
                out.push_str(&scan_row_csv(row));
            }
            out
        }
        ScanFormat::Json => {
            let rows: Vec<ScanRowJson> = rows.iter().map(ScanRowJson::from).collect();
            serde_json::to_string_pretty(&rows)?
        }
    };
    emit(args.output.as_ref(), &text)?;
    Ok(exit_code::OK)
}

fn run_distill(args: DistillArgs) -> Result<i32, CliError> {
    let rho = load(&args.state)?;
    let mode = match args.mode {
        ModeArg::Full => DistillMode::Full,
        ModeArg::Proj2 => DistillMode::Proj2,
    };
    let report = distill_search(&rho, args.trials, args.seed, mode)?;
    let json = serde_json::to_string_pretty(&DistillJson::from(&report))?;
    emit(args.output.as_ref(), &json)?;
    Ok(exit_code::OK)
}

fn run_key_bound(args: KeyBoundArgs) -> Result<i32, CliError> {
    let report = match (args.eps, args.state.as_ref()) {
        (Some(eps), None) => key_bound(eps, args.da)?,
        (None, Some(path)) => {
            let rho = load(path)?;
            let (eps, _) = distance_to_extendible_set(&rho, args.k)?;
            let d_a = rho
                .profile()
                .dim_of(symext_core::linalg::Party::A);
            key_bound(eps, d_a)?
        }
        _ => {
            return Err(CliError::validation(
                "provide exactly one of --eps or --state",
            ))
        }
    };
    let json = serde_json::to_string_pretty(&KeyBoundJson::from(&report))?;
    emit(args.output.as_ref(), &json)?;
    Ok(exit_code::OK)
}

fn run_locking(args: LockingArgs) -> Result<i32, CliError> {
    let report = locking_demo(args.d)?;
    let json = serde_json::to_string_pretty(&LockingJson::from(&report))?;
    emit(args.output.as_ref(), &json)?;
    Ok(exit_code::OK)
}

fn run_selftest(args: SelftestArgs) -> Result<i32, CliError> {
    let indices: Vec<usize> = if args.only.is_empty() {
        crate::selftest::CRITERIA.iter().map(|(i, _)| *i).collect()
    } else {
        args.only
    };
    let mut all_passed = true;
    for index in indices {
        match crate::selftest::run_criterion(index) {
            Some(outcome) => {
                println!("{}", outcome.line());
                all_passed &= outcome.passed;
            }
            None => {
                return Err(CliError::validation(format!(
                    "no criterion with index {index}"
                )))
            }
        }
    }
    Ok(if all_passed {
        exit_code::OK
    } else {
        exit_code::NUMERICAL
    })
}
