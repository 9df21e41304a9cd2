//! Daily rolling-horizon loop and realized metrics.
//!
//! Each study day `T` the driver builds the window `T ..= T + H` from the
//! forecasts issued on `T`, solves it, commits the day-`T` slice and feeds the
//! committed statuses forward as the next day's initial condition. Metrics are
//! always computed against realized (issue = target) risk.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DataError, ModelError, SolveError};
use crate::grid::Network;
use crate::milp::{branch_and_bound, BranchOptions, MilpStatus, DEFAULT_NODE_BUDGET};
use crate::model::{build_mopsar, extract_schedule, max_served_load, MopsarParams, RestorationBudget, SCHEDULE_TOL};
use crate::risk::{forecast_window, RiskForecastSet};

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "GRIDSHUTOFF_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: MopsarParams,
    /// Lookahead days beyond the decision day; 0 solves each day alone.
    pub horizon: usize,
    pub start_day: usize,
    /// Last study day solved, inclusive.
    pub end_day: usize,
    pub node_budget: u64,
    /// Line statuses before `start_day`; all energized when absent.
    pub initial_status: Option<Vec<bool>>,
}

impl RunConfig {
    /// Baseline parameters over the whole study window of `net`.
    pub fn for_network(net: &Network) -> Self {
        RunConfig {
            params: MopsarParams::default(),
            horizon: 4,
            start_day: 0,
            end_day: net.num_days - 1,
            node_budget: DEFAULT_NODE_BUDGET,
            initial_status: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub status: MilpStatus,
    /// Normalized window objective of the committed incumbent.
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub wall_time: f64,
    pub node_count: u64,
    pub lp_count: u64,
    pub window_periods: usize,
    /// Requested horizon exceeded the forecast lead.
    pub clamped: bool,
}

/// Committed actions and realized metrics of one study day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayRecord {
    pub day: usize,
    pub status: Vec<bool>,
    pub restored: Vec<bool>,
    pub served: Vec<f64>,
    /// Per-unit flow, `from_bus` to `to_bus`.
    pub flow: Vec<f64>,
    pub realized_risk: Vec<f64>,
    pub demand_mw: f64,
    pub weighted_demand_mw: f64,
    pub load_served_mw: f64,
    pub weighted_served_mw: f64,
    pub load_served_pct: f64,
    /// Load servable with every line energized.
    pub load_no_shutoff_mw: f64,
    pub risk_no_shutoff: f64,
    pub risk_with_shutoff: f64,
    pub vulnerability: f64,
    pub deenergizations: usize,
    pub reenergizations: usize,
    pub miles_restored: f64,
    pub solve: SolveDiagnostics,
}

/// Everything the reports need; reports are pure views of this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedTrajectory {
    pub line_ids: Vec<String>,
    pub line_miles: Vec<f64>,
    pub initial_status: Vec<bool>,
    pub config: RunConfig,
    pub days: Vec<DayRecord>,
}

impl RealizedTrajectory {
    pub fn budget_exhausted(&self) -> bool {
        self.days.iter().any(|d| d.solve.status == MilpStatus::BudgetExhausted)
    }
}

pub fn run_rolling_horizon(
    net: &Network,
    fs: &RiskForecastSet,
    config: &RunConfig,
) -> Result<RealizedTrajectory, ModelError> {
    config.params.validate()?;
    if config.start_day > config.end_day || config.end_day >= net.num_days {
        return Err(DataError::InvalidArgument(format!(
            "days {}..={} outside the {}-day study window",
            config.start_day, config.end_day, net.num_days
        ))
        .into());
    }
    let n_lines = net.lines.len();
    let initial = match &config.initial_status {
        Some(s) if s.len() != n_lines => {
            return Err(
                DataError::InvalidArgument(format!("initial status covers {} of {n_lines} lines", s.len())).into(),
            )
        }
        Some(s) => s.clone(),
        None => vec![true; n_lines],
    };
    let opts = BranchOptions {
        gap: config.params.gap,
        node_budget: config.node_budget,
        ..Default::default()
    };

    let mut prev = initial.clone();
    let mut days = Vec::new();
    for day in config.start_day..=config.end_day {
        let record = solve_day(net, fs, config, &opts, day, &prev).map_err(|e| e.at_day(day))?;
        prev = record.status.clone();
        days.push(record);
    }
    Ok(RealizedTrajectory {
        line_ids: net.lines.iter().map(|l| l.id.clone()).collect(),
        line_miles: net.lines.iter().map(|l| l.length_miles).collect(),
        initial_status: initial,
        config: config.clone(),
        days,
    })
}

fn solve_day(
    net: &Network,
    fs: &RiskForecastSet,
    config: &RunConfig,
    opts: &BranchOptions,
    day: usize,
    prev: &[bool],
) -> Result<DayRecord, ModelError> {
    let params = &config.params;
    let window = forecast_window(fs, day, config.horizon, net)?;
    let started = Instant::now();
    let model = build_mopsar(net, &window, prev, params)?;
    let solution = branch_and_bound(&model.problem, opts)?;
    match solution.status {
        MilpStatus::Infeasible => return Err(SolveError::Infeasible.into()),
        MilpStatus::BudgetExhausted if !solution.has_incumbent() => return Err(ModelError::NoIncumbent { day }),
        MilpStatus::BudgetExhausted => warn!(
            "day {day}: node budget exhausted, committing incumbent (gap {:.3e})",
            solution.gap
        ),
        MilpStatus::OptimalWithinGap => {}
    }
    let schedule = extract_schedule(&solution, &model, net, &window, params)?;
    let wall_time = started.elapsed().as_secs_f64();

    let realized = fs
        .realized(day)
        .ok_or_else(|| DataError::Risk(format!("no realized risk for day {day}")))?;
    let status = schedule.status[0].clone();
    let restored: Vec<bool> = status.iter().zip(prev).map(|(now, before)| *now && !*before).collect();
    let deenergizations = status
        .iter()
        .zip(prev)
        .filter(|(now, before)| !**now && **before)
        .count();
    let miles_restored: f64 = restored
        .iter()
        .zip(&net.lines)
        .filter(|(r, _)| **r)
        .map(|(_, l)| l.length_miles)
        .sum();
    let budget = params.restoration_budget.for_day(day).unwrap_or(f64::INFINITY);
    if miles_restored > budget + SCHEDULE_TOL {
        return Err(ModelError::Decode(format!(
            "committed restorations use {miles_restored} of {budget} miles"
        )));
    }

    let served = schedule.served[0].clone();
    let mut demand_mw = 0.0;
    let mut weighted_demand_mw = 0.0;
    let mut load_served_mw = 0.0;
    let mut weighted_served_mw = 0.0;
    for (load, x) in net.loads.iter().zip(&served) {
        let p = load.demand_profile[day];
        demand_mw += p;
        weighted_demand_mw += load.weight * p;
        load_served_mw += x * p;
        weighted_served_mw += x * load.weight * p;
    }
    let load_no_shutoff_mw = max_served_load(net, day, &vec![true; net.lines.len()], params)?;
    let risk_no_shutoff: f64 = realized.iter().sum();
    let risk_with_shutoff: f64 = realized
        .iter()
        .zip(&status)
        .filter(|(_, on)| **on)
        .map(|(r, _)| r)
        .sum();
    let vulnerability = params.risk_threshold * status.iter().filter(|on| !**on).count() as f64;
    info!(
        "day {day}: {} lines off, {:.1}% load served, gap {:.2e}, {} nodes, {:.2}s",
        status.iter().filter(|on| !**on).count(),
        pct(load_served_mw, demand_mw),
        solution.gap,
        solution.node_count,
        wall_time
    );

    Ok(DayRecord {
        day,
        reenergizations: restored.iter().filter(|r| **r).count(),
        restored,
        served,
        flow: schedule.flow[0].clone(),
        realized_risk: realized,
        demand_mw,
        weighted_demand_mw,
        load_served_mw,
        weighted_served_mw,
        load_served_pct: pct(load_served_mw, demand_mw),
        load_no_shutoff_mw,
        risk_no_shutoff,
        risk_with_shutoff,
        vulnerability,
        deenergizations,
        miles_restored,
        solve: SolveDiagnostics {
            status: solution.status,
            objective: solution.objective_value.unwrap_or(f64::NAN),
            best_bound: solution.best_bound.unwrap_or(f64::NAN),
            gap: solution.gap,
            wall_time,
            node_count: solution.node_count,
            lp_count: solution.lp_count,
            window_periods: window.periods(),
            clamped: window.clamped,
        },
        status,
    })
}

fn pct(part: f64, whole: f64) -> f64 {
    if whole > 0.0 {
        100.0 * part / whole
    } else {
        100.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedSummary {
    pub days: usize,
    pub total_demand_mw: f64,
    pub total_load_served_mw: f64,
    pub load_served_pct: f64,
    pub total_load_no_shutoff_mw: f64,
    pub total_risk_no_shutoff: f64,
    pub total_risk_with_shutoff: f64,
    pub risk_reduction_pct: f64,
    pub total_vulnerability: f64,
    pub deenergizations: usize,
    pub reenergizations: usize,
    pub miles_restored: f64,
    /// Threshold-form objective evaluated on realized risk over the whole
    /// study, with totals taken over the solved days.
    pub objective: f64,
    pub max_gap: f64,
    pub total_wall_time: f64,
    pub total_nodes: u64,
    pub budget_exhausted_days: usize,
}

pub fn realized_metrics(traj: &RealizedTrajectory) -> RealizedSummary {
    let days = &traj.days;
    let sum = |f: &dyn Fn(&DayRecord) -> f64| days.iter().map(f).sum::<f64>();
    let total_demand_mw = sum(&|d| d.demand_mw);
    let total_load_served_mw = sum(&|d| d.load_served_mw);
    let total_risk_no_shutoff = sum(&|d| d.risk_no_shutoff);
    let total_risk_with_shutoff = sum(&|d| d.risk_with_shutoff);
    let params = &traj.config.params;
    let v = params.risk_threshold;
    let threshold_sum = sum(&|d| {
        d.status
            .iter()
            .zip(&d.realized_risk)
            .filter(|(on, _)| **on)
            .map(|(_, r)| r - v)
            .sum::<f64>()
    });
    let mut objective = 0.0;
    if total_demand_mw > 0.0 {
        objective += (1.0 - params.alpha) * sum(&|d| d.weighted_served_mw) / total_demand_mw;
    }
    if total_risk_no_shutoff > 0.0 {
        objective -= params.alpha * threshold_sum / total_risk_no_shutoff;
    }
    RealizedSummary {
        days: days.len(),
        total_demand_mw,
        total_load_served_mw,
        load_served_pct: pct(total_load_served_mw, total_demand_mw),
        total_load_no_shutoff_mw: sum(&|d| d.load_no_shutoff_mw),
        total_risk_no_shutoff,
        total_risk_with_shutoff,
        risk_reduction_pct: if total_risk_no_shutoff > 0.0 {
            100.0 * (1.0 - total_risk_with_shutoff / total_risk_no_shutoff)
        } else {
            0.0
        },
        total_vulnerability: sum(&|d| d.vulnerability),
        deenergizations: days.iter().map(|d| d.deenergizations).sum(),
        reenergizations: days.iter().map(|d| d.reenergizations).sum(),
        miles_restored: sum(&|d| d.miles_restored),
        objective,
        max_gap: days.iter().map(|d| d.solve.gap).fold(0.0, f64::max),
        total_wall_time: sum(&|d| d.solve.wall_time),
        total_nodes: days.iter().map(|d| d.solve.node_count).sum(),
        budget_exhausted_days: days
            .iter()
            .filter(|d| d.solve.status == MilpStatus::BudgetExhausted)
            .count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub count: usize,
    pub avg: f64,
    pub min: f64,
    pub max: f64,
}

/// Realized risk of energized and de-energized line-days; an empty group is
/// `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineRiskStats {
    pub energized: Option<GroupStats>,
    pub deenergized: Option<GroupStats>,
}

pub fn line_risk_stats(traj: &RealizedTrajectory) -> LineRiskStats {
    let group = |want: bool| {
        let values: Vec<f64> = traj
            .days
            .iter()
            .flat_map(|d| d.status.iter().zip(&d.realized_risk))
            .filter(|(on, _)| **on == want)
            .map(|(_, r)| *r)
            .collect();
        (!values.is_empty()).then(|| GroupStats {
            count: values.len(),
            avg: values.iter().sum::<f64>() / values.len() as f64,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    };
    LineRiskStats {
        energized: group(true),
        deenergized: group(false),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Horizon,
    Budget,
    Threshold,
    Alpha,
}

impl FromStr for SweepAxis {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "horizon" => Ok(SweepAxis::Horizon),
            "budget" => Ok(SweepAxis::Budget),
            "threshold" => Ok(SweepAxis::Threshold),
            "alpha" => Ok(SweepAxis::Alpha),
            other => Err(DataError::InvalidArgument(format!(
                "unknown sweep axis `{other}` (expected horizon, budget, threshold or alpha)"
            ))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Horizon => "horizon",
            SweepAxis::Budget => "budget",
            SweepAxis::Threshold => "threshold",
            SweepAxis::Alpha => "alpha",
        })
    }
}

impl SweepAxis {
    /// `base` with this axis set to `value`.
    pub fn apply(self, base: &RunConfig, value: f64) -> Result<RunConfig, DataError> {
        let mut c = base.clone();
        match self {
            SweepAxis::Horizon => {
                if !(value >= 0.0 && value.fract() == 0.0 && value.is_finite()) {
                    return Err(DataError::InvalidArgument(format!(
                        "horizon must be a whole number of days, got {value}"
                    )));
                }
                c.horizon = value as usize;
            }
            SweepAxis::Budget => c.params.restoration_budget = RestorationBudget::Uniform(value),
            SweepAxis::Threshold => c.params.risk_threshold = value,
            SweepAxis::Alpha => c.params.alpha = value,
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub summary: Option<RealizedSummary>,
    pub line_risk: Option<LineRiskStats>,
    pub error: Option<String>,
}

/// Worker count for sweeps: `GRIDSHUTOFF_THREADS` when set to a positive
/// integer, otherwise rayon's default.
pub fn sweep_threads() -> Option<usize> {
    let raw = std::env::var(THREADS_ENV).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            warn!("ignoring {THREADS_ENV}={raw}");
            None
        }
    }
}

/// One full rolling-horizon run per value. Run failures are recorded in their
/// row; the sweep itself only fails on an empty value list.
pub fn sweep(
    net: &Network,
    fs: &RiskForecastSet,
    base: &RunConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<SweepRow>, DataError> {
    if values.is_empty() {
        return Err(DataError::InvalidArgument("sweep needs at least one value".into()));
    }
    let run = |&value: &f64| -> SweepRow {
        let outcome = axis
            .apply(base, value)
            .map_err(ModelError::from)
            .and_then(|c| run_rolling_horizon(net, fs, &c));
        match outcome {
            Ok(traj) => SweepRow {
                axis,
                value,
                summary: Some(realized_metrics(&traj)),
                line_risk: Some(line_risk_stats(&traj)),
                error: None,
            },
            Err(e) => {
                warn!("sweep {axis}={value} failed: {e}");
                SweepRow {
                    axis,
                    value,
                    summary: None,
                    line_risk: None,
                    error: Some(e.to_string()),
                }
            }
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = sweep_threads() {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => Ok(pool.install(|| values.par_iter().map(run).collect())),
        Err(e) => {
            warn!("thread pool unavailable ({e}); sweeping sequentially");
            Ok(values.iter().map(run).collect())
        }
    }
}
