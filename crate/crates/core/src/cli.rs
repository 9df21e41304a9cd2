//! Command-line front end: `run`, `sweep`, `export-mps`, `validate` and
//! `report`.
//!
//! Exit codes: 0 success, 1 other failures, 2 usage errors, 3 data errors,
//! 4 node budget exhausted (results from the incumbents are still written).

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{DataError, ModelError};
use crate::grid::{load_network, Network};
use crate::horizon::{realized_metrics, run_rolling_horizon, sweep, RunConfig, SweepAxis};
use crate::milp::{export_mps, DEFAULT_GAP, DEFAULT_NODE_BUDGET};
use crate::model::{build_mopsar, MopsarParams, RestorationBudget};
use crate::report::{emit_reports, emit_sweep, reemit_reports, write_atomic, EmitFlags};
use crate::risk::{forecast_window, load_forecasts, load_raster_forecasts, RiskForecastSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "gridshutoff",
    version,
    about = "Wildfire-aware power shutoff and restoration planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rolling-horizon study over the selected days.
    Run(ScenarioArgs),
    /// One rolling-horizon study per value of a parameter.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_parser = parse_axis)]
        axis: SweepAxis,
        /// Comma-separated values, e.g. `1,2,3`.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Writes the MPS file of one day's window.
    ExportMps {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Issue day of the window; defaults to the start day.
        #[arg(long)]
        day: Option<usize>,
    },
    /// Loads and checks the network and risk inputs.
    Validate {
        #[arg(long)]
        network: PathBuf,
        #[command(flatten)]
        risk: RiskArgs,
    },
    /// Regenerates reports from a saved results file.
    Report {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_values = ["csv", "json", "svg"])]
        emit: Vec<EmitKind>,
    },
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
struct RiskArgs {
    /// Forecast table `issue_day,target_day,line_id,risk`.
    #[arg(long)]
    risk: Option<PathBuf>,
    /// ASCII grid, or a CSV manifest `issue_day,target_day,path` of grids.
    #[arg(long)]
    raster: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long)]
    network: PathBuf,
    #[command(flatten)]
    risk: RiskArgs,
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    #[arg(long = "risk-threshold", default_value_t = 100.0)]
    risk_threshold: f64,
    /// Miles restorable per day; `inf` removes the limit.
    #[arg(long, default_value_t = 75.0)]
    budget: f64,
    #[arg(long, default_value_t = 4)]
    horizon: usize,
    /// Relative optimality gap (1e-4 = 0.01%).
    #[arg(long, default_value_t = DEFAULT_GAP)]
    gap: f64,
    #[arg(long = "start-day", default_value_t = 0)]
    start_day: usize,
    /// Last day solved (inclusive); defaults to the end of the study.
    #[arg(long = "end-day")]
    end_day: Option<usize>,
    #[arg(long = "node-budget", default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverChoice::Bundled)]
    solver: SolverChoice,
    #[arg(long, value_delimiter = ',', default_values = ["csv", "json", "svg"])]
    emit: Vec<EmitKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    /// Built-in branch and bound.
    Bundled,
    /// Only write the first window as MPS for an external solver.
    MpsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitKind {
    Csv,
    Json,
    Svg,
}

fn emit_flags(kinds: &[EmitKind]) -> EmitFlags {
    EmitFlags {
        csv: kinds.contains(&EmitKind::Csv),
        json: kinds.contains(&EmitKind::Json),
        svg: kinds.contains(&EmitKind::Svg),
    }
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse().map_err(|e: DataError| e.to_string())
}

/// Where the risk inputs come from.
#[derive(Debug, Clone, PartialEq)]
pub enum RiskSource {
    Table(PathBuf),
    Raster(PathBuf),
}

/// Fully resolved inputs of a run or sweep.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub network: PathBuf,
    pub risk: RiskSource,
    pub out: PathBuf,
    pub run: RunConfig,
    pub solver: SolverChoice,
    pub sweep: Option<(SweepAxis, Vec<f64>)>,
    pub emit: EmitFlags,
}

impl ScenarioConfig {
    fn from_args(a: &ScenarioArgs, net: &Network) -> Result<Self, Failure> {
        let risk = match (&a.risk.risk, &a.risk.raster) {
            (Some(p), None) => RiskSource::Table(p.clone()),
            (None, Some(p)) => RiskSource::Raster(p.clone()),
            _ => return Err(Failure::Usage("one of --risk or --raster is required".into())),
        };
        let params = MopsarParams {
            alpha: a.alpha,
            risk_threshold: a.risk_threshold,
            restoration_budget: RestorationBudget::Uniform(a.budget),
            gap: a.gap,
            ..MopsarParams::default()
        };
        params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        let end_day = a.end_day.unwrap_or(net.num_days - 1);
        if a.start_day > end_day || end_day >= net.num_days {
            return Err(Failure::Usage(format!(
                "days {}..={end_day} are outside the {}-day study window",
                a.start_day, net.num_days
            )));
        }
        Ok(ScenarioConfig {
            network: a.network.clone(),
            risk,
            out: a.out.clone(),
            run: RunConfig {
                params,
                horizon: a.horizon,
                start_day: a.start_day,
                end_day,
                node_budget: a.node_budget,
                initial_status: None,
            },
            solver: a.solver,
            sweep: None,
            emit: emit_flags(&a.emit),
        })
    }

    pub fn load_risk(&self, net: &Network) -> Result<RiskForecastSet, DataError> {
        match &self.risk {
            RiskSource::Table(p) => load_forecasts(p, net),
            RiskSource::Raster(p) => load_raster_forecasts(p, net),
        }
    }
}

enum Failure {
    Usage(String),
    Data(String),
    Budget(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Budget(_) => EXIT_BUDGET,
            Failure::Other(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Budget(m) | Failure::Other(m) => f.write_str(m),
        }
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let mut root = &e;
        while let ModelError::Day { source, .. } = root {
            root = source;
        }
        match root {
            ModelError::Data(_) => Failure::Data(e.to_string()),
            ModelError::NoIncumbent { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            if matches!(f, Failure::Usage(_)) {
                eprintln!("run `gridshutoff --help` for usage");
            }
            f.code()
        }
    }
}

fn require_file(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Data(format!("{}: no such file", path.display())))
    }
}

fn prepare(a: &ScenarioArgs) -> Result<(Network, ScenarioConfig), Failure> {
    require_file(&a.network)?;
    if let Some(p) = a.risk.risk.as_ref().or(a.risk.raster.as_ref()) {
        require_file(p)?;
    }
    let net = load_network(&a.network)?;
    let cfg = ScenarioConfig::from_args(a, &net)?;
    Ok((net, cfg))
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Run(a) => {
            let (net, cfg) = prepare(&a)?;
            let fs = cfg.load_risk(&net)?;
            if cfg.solver == SolverChoice::MpsOnly {
                let path = write_window_mps(&net, &fs, &cfg, cfg.run.start_day, "")?;
                println!("wrote {}", path.display());
                return Ok(EXIT_OK);
            }
            let traj = run_rolling_horizon(&net, &fs, &cfg.run)?;
            let written = emit_reports(&traj, &cfg.out, cfg.emit)?;
            let s = realized_metrics(&traj);
            println!(
                "{} days: {:.2}% load served, risk {:.1} -> {:.1}, {} de-energizations, {} re-energizations ({:.1} mi)",
                s.days,
                s.load_served_pct,
                s.total_risk_no_shutoff,
                s.total_risk_with_shutoff,
                s.deenergizations,
                s.reenergizations,
                s.miles_restored
            );
            for p in written {
                println!("wrote {}", p.display());
            }
            if traj.budget_exhausted() {
                eprintln!(
                    "warning: node budget exhausted on {} day(s); committed incumbents",
                    s.budget_exhausted_days
                );
                return Ok(EXIT_BUDGET);
            }
            Ok(EXIT_OK)
        }
        Command::Sweep { scenario, axis, values } => {
            let (net, mut cfg) = prepare(&scenario)?;
            cfg.sweep = Some((axis, values.clone()));
            let fs = cfg.load_risk(&net)?;
            if cfg.solver == SolverChoice::MpsOnly {
                for v in &values {
                    let mut one = cfg.clone();
                    one.run = axis.apply(&cfg.run, *v)?;
                    let path = write_window_mps(&net, &fs, &one, one.run.start_day, &format!("{axis}_{v}_"))?;
                    println!("wrote {}", path.display());
                }
                return Ok(EXIT_OK);
            }
            let rows = sweep(&net, &fs, &cfg.run, axis, &values)?;
            for p in emit_sweep(&rows, &cfg.out, cfg.emit)? {
                println!("wrote {}", p.display());
            }
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("warning: {failed} of {} sweep runs failed", rows.len());
                return Ok(EXIT_FAILURE);
            }
            let exhausted = rows
                .iter()
                .filter_map(|r| r.summary.as_ref())
                .any(|s| s.budget_exhausted_days > 0);
            Ok(if exhausted { EXIT_BUDGET } else { EXIT_OK })
        }
        Command::ExportMps { scenario, day } => {
            let (net, cfg) = prepare(&scenario)?;
            let fs = cfg.load_risk(&net)?;
            let day = day.unwrap_or(cfg.run.start_day);
            let path = write_window_mps(&net, &fs, &cfg, day, "")?;
            println!("wrote {}", path.display());
            Ok(EXIT_OK)
        }
        Command::Validate { network, risk } => {
            require_file(&network)?;
            let net = load_network(&network)?;
            println!(
                "network: {} buses, {} lines, {} generators, {} loads, {} days",
                net.buses.len(),
                net.lines.len(),
                net.generators.len(),
                net.loads.len(),
                net.num_days
            );
            let fs = match (risk.risk, risk.raster) {
                (Some(p), _) => Some(load_forecasts(&p, &net)?),
                (_, Some(p)) => Some(load_raster_forecasts(&p, &net)?),
                _ => None,
            };
            if let Some(fs) = fs {
                println!(
                    "risk: {} entries, {} issue days, lead up to {} days",
                    fs.entry_count(),
                    fs.issue_days().count(),
                    fs.max_lead()
                );
            }
            println!("ok");
            Ok(EXIT_OK)
        }
        Command::Report { results, out, emit } => {
            require_file(&results)?;
            for p in reemit_reports(&results, &out, emit_flags(&emit))? {
                println!("wrote {}", p.display());
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_window_mps(
    net: &Network,
    fs: &RiskForecastSet,
    cfg: &ScenarioConfig,
    day: usize,
    prefix: &str,
) -> Result<PathBuf, Failure> {
    if day >= net.num_days {
        return Err(Failure::Usage(format!(
            "day {day} is outside the {}-day study window",
            net.num_days
        )));
    }
    let window = forecast_window(fs, day, cfg.run.horizon, net)?;
    let initial = cfg
        .run
        .initial_status
        .clone()
        .unwrap_or_else(|| vec![true; net.lines.len()]);
    let model = build_mopsar(net, &window, &initial, &cfg.run.params)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| DataError::io(&cfg.out, e))?;
    let path = cfg.out.join(format!("{prefix}window_day{day}.mps"));
    write_atomic(&path, &export_mps(&model.problem))?;
    Ok(path)
}
