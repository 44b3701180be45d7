//! Command-line front end for `iontrap-core`: figure data, single solves,
//! the validation suite, cat-state reports and raw diagonalization.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cat;
pub mod config;
pub mod error;
pub mod figure;
pub mod format;
pub mod oracle_cmd;
pub mod output;
pub mod solve;
pub mod validate;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use iontrap_core::series::TerminationGuess;
use iontrap_core::{Branch, ModelParams};

use config::{resolve_cutoff, resolve_format, CommandKind, EtaRange, Format, RunConfig};
use error::{CliError, CliResult};
use validate::{Grid, Suite};

#[derive(Debug, Parser)]
#[command(name = "iontrap", version, about = "Trapped-ion spectra beyond the rotating-wave approximation")]
pub struct Cli {
    /// JSON file with run settings; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy curves versus η: rotating-wave branches, the order-one identity
    /// curve and the order-two roots.
    Fig(FigArgs),
    /// Terminated series solution at a given order.
    Solve(SolveArgs),
    /// Run the invariant suite; exit 1 if any check fails.
    Validate(ValidateArgs),
    /// Displaced even coherent state report.
    Cat(CatArgs),
    /// Diagonalize the Hamiltonian directly.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct FigArgs {
    #[arg(long)]
    pub omega: Option<f64>,
    /// η sweep as min:max:step [default: 0:1:0.01].
    #[arg(long)]
    pub eta: Option<EtaRange>,
    /// Comma-separated subset of `+,-`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub branches: Option<Vec<Branch>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write rotating-wave/non-rotating-wave crossing points here.
    #[arg(long)]
    pub crossings: Option<PathBuf>,
    /// Add nearest-eigenvalue rows for every non-rotating-wave point.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub order: Option<usize>,
    /// Comma-separated subset of `+,-` [default: +].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub branch: Option<Vec<Branch>>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Lab detuning Δ.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "eps")]
    pub detuning: Option<f64>,
    /// Transformed-frame detuning ε = −Δ/2.
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long, requires = "guess_eps")]
    pub guess_omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "guess_omega")]
    pub guess_eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "guess_omega")]
    pub guess_c0: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value = "50x50")]
    pub grid: Grid,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Shift every series energy before the oracle check (negative control).
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub perturb_energy: f64,
}

#[derive(Debug, Args)]
pub struct CatArgs {
    #[arg(long)]
    pub eta: Option<f64>,
    /// Effective laser frequency; the preparation time is 4π/ω_l.
    #[arg(long, default_value_t = 1.0)]
    pub omega_l: f64,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the Wigner function as x,p,w rows.
    #[arg(long)]
    pub wigner_out: Option<PathBuf>,
    #[arg(long, default_value_t = 4.0)]
    pub wigner_radius: f64,
    #[arg(long, default_value_t = 81)]
    pub wigner_points: usize,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "eps")]
    pub detuning: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<f64>,
    /// Comma-separated increasing cutoffs for a convergence scan.
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Vec<usize>,
    #[arg(long)]
    pub lab: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn require<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::usage(format!("missing --{flag}")))
}

fn dedup(branches: Vec<Branch>) -> Vec<Branch> {
    let mut out = Vec::new();
    for b in branches {
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

fn detuning_of(detuning: Option<f64>, eps: Option<f64>) -> CliResult<Option<f64>> {
    match (detuning, eps) {
        (Some(_), Some(_)) => Err(CliError::usage("give either detuning or eps, not both")),
        (Some(d), None) => Ok(Some(d)),
        (None, Some(e)) => Ok(Some(-2.0 * e)),
        (None, None) => Ok(None),
    }
}

fn command_name(kind: CommandKind) -> &'static str {
    match kind {
        CommandKind::Fig => "fig",
        CommandKind::Solve => "solve",
        CommandKind::Validate => "validate",
        CommandKind::Cat => "cat",
        CommandKind::Oracle => "oracle",
    }
}

fn kind_of(c: &Command) -> CommandKind {
    match c {
        Command::Fig(_) => CommandKind::Fig,
        Command::Solve(_) => CommandKind::Solve,
        Command::Validate(_) => CommandKind::Validate,
        Command::Cat(_) => CommandKind::Cat,
        Command::Oracle(_) => CommandKind::Oracle,
    }
}

/// Parses `args` (program name first) and runs them; for embedding and tests.
pub fn run_from<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::usage(e.to_string()))?;
    run(cli)
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let command = match (cli.command, cfg.command) {
        (Some(c), Some(k)) if kind_of(&c) != k => {
            return Err(CliError::usage(format!(
                "config asks for `{}` but the command line runs `{}`",
                command_name(k),
                command_name(kind_of(&c))
            )))
        }
        (Some(c), _) => c,
        (None, Some(k)) => {
            Cli::try_parse_from(["iontrap", command_name(k)])
                .map_err(|e| CliError::usage(e.to_string()))?
                .command
                .expect("subcommand given")
        }
        (None, None) => return Err(CliError::usage("no command given (try --help)")),
    };
    match command {
        Command::Fig(a) => run_fig(a, &cfg),
        Command::Solve(a) => run_solve(a, &cfg),
        Command::Validate(a) => run_validate(a, &cfg),
        Command::Cat(a) => run_cat(a, &cfg),
        Command::Oracle(a) => run_oracle(a, &cfg),
    }
}

pub fn run_fig(a: FigArgs, cfg: &RunConfig) -> CliResult<()> {
    let rabi = require(a.omega.or(cfg.omega), "omega")?;
    let range = a.eta.or(cfg.eta_range).unwrap_or(EtaRange::DEFAULT);
    let branches = a.branches.map(dedup).or_else(|| cfg.branches.clone()).unwrap_or(Branch::BOTH.to_vec());
    let out = a.out.or_else(|| cfg.output_path.clone());
    let format = resolve_format(a.format.or(cfg.format), out.as_deref());
    let oracle_cutoff = if a.oracle {
        Some(resolve_cutoff(a.cutoff, cfg.cutoff)?)
    } else {
        None
    };
    let spec = figure::FigureSpec {
        rabi,
        etas: range.points(),
        branches,
        oracle_cutoff,
    };
    let fig = figure::Figure::new(&spec)?;
    if !fig.resonant {
        eprintln!(
            "note: omega={} is off resonance; rotating-wave curves use the nearest family {}={}",
            format::fmt_g(rabi),
            fig.scheme,
            fig.index
        );
    }
    let rows = figure::figure_points(&spec)?;
    let crossings = figure::crossings(&spec)?;
    output::emit(out.as_deref(), &output::curves(&rows, format)?)?;
    if let Some(path) = a.crossings {
        let f = resolve_format(None, Some(&path));
        output::emit(Some(&path), &output::crossings(&crossings, f)?)?;
    }
    eprintln!("{} rows, {} crossings", rows.len(), crossings.len());
    Ok(())
}

pub fn run_solve(a: SolveArgs, cfg: &RunConfig) -> CliResult<()> {
    let order = require(a.order.or(cfg.order), "order")?;
    let eta = require(a.eta.or(cfg.eta), "eta")?;
    let detuning = match detuning_of(a.detuning, a.eps)? {
        Some(d) => Some(d),
        None => detuning_of(cfg.detuning, cfg.eps)?,
    };
    let branches = a.branch.map(dedup).or_else(|| cfg.branches.clone()).unwrap_or(vec![Branch::Plus]);
    let guess = a.guess_omega.map(|rabi| TerminationGuess {
        rabi,
        eps: a.guess_eps.unwrap_or(0.0),
        c0: a.guess_c0,
    });
    let req = solve::SolveRequest {
        order,
        eta,
        branches,
        rabi: a.omega.or(cfg.omega),
        eps: detuning.map(|d| -d / 2.0),
        guess,
        cutoff: resolve_cutoff(a.cutoff, cfg.cutoff)?,
    };
    let solved = solve::solve(&req)?;
    let out = a.out.or_else(|| cfg.output_path.clone());
    output::emit(out.as_deref(), &output::json_bytes(&solve::solutions_json(&req, &solved)))
}

pub fn run_validate(a: ValidateArgs, cfg: &RunConfig) -> CliResult<()> {
    let opts = validate::ValidateOptions {
        suite: a.suite,
        grid: a.grid,
        cutoff: resolve_cutoff(a.cutoff, cfg.cutoff)?,
        perturb_energy: a.perturb_energy,
    };
    let checks = validate::run_suite(&opts)?;
    let out = a.out.or_else(|| cfg.output_path.clone());
    output::emit(out.as_deref(), &output::json_bytes(&validate::report_json(&opts, &checks)))?;
    for c in &checks {
        eprintln!(
            "{:<24} {}  ({} cases, worst {})",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.cases,
            format::fmt_g(c.worst)
        );
    }
    validate::verdict(&checks)
}

pub fn run_cat(a: CatArgs, cfg: &RunConfig) -> CliResult<()> {
    let req = cat::CatRequest {
        eta: require(a.eta.or(cfg.eta), "eta")?,
        omega_l: a.omega_l,
        cutoff: resolve_cutoff(a.cutoff, cfg.cutoff)?,
        levels: a.levels,
    };
    let report = cat::cat_report(&req)?;
    let out = a.out.or_else(|| cfg.output_path.clone());
    output::emit(out.as_deref(), &output::json_bytes(&report))?;
    if let Some(path) = a.wigner_out {
        output::emit(Some(&path), &cat::wigner_csv(&req, a.wigner_radius, a.wigner_points)?)?;
    }
    Ok(())
}

pub fn run_oracle(a: OracleArgs, cfg: &RunConfig) -> CliResult<()> {
    let detuning = match detuning_of(a.detuning, a.eps)? {
        Some(d) => d,
        None => detuning_of(cfg.detuning, cfg.eps)?.unwrap_or(0.0),
    };
    let params = ModelParams::new(
        require(a.omega.or(cfg.omega), "omega")?,
        require(a.eta.or(cfg.eta), "eta")?,
        detuning,
    )?;
    let req = oracle_cmd::OracleRequest {
        params,
        cutoff: resolve_cutoff(a.cutoff, cfg.cutoff)?,
        count: a.count,
        target: a.target,
        cutoffs: a.cutoffs,
        lab: a.lab,
    };
    let report = oracle_cmd::oracle_report(&req)?;
    let out = a.out.or_else(|| cfg.output_path.clone());
    output::emit(out.as_deref(), &output::json_bytes(&report))
}
