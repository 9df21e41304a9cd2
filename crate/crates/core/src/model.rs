//! The multi-period optimal power shutoff and restoration program.
//!
//! For every period of a risk window the model carries line statuses `z`
//! (binary), restoration indicators `y`, served load fractions `x`, generator
//! outputs, DC line flows and bus angles. It maximizes
//!
//! ```text
//! (1 - alpha) * sum(x w P_D) / D_tot  -  alpha * sum(z (R - V)) / R_tot
//! ```
//!
//! which equals the load/risk/vulnerability trade-off up to the constant
//! `alpha * |L| |T| V / R_tot`, dropped here because it does not move the
//! argmax. `y` is declared continuous: the three logic rows pin it to
//! `(not z_prev) and z` whenever `z` is binary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::grid::Network;
use crate::milp::{
    branch_and_bound, check_solution, BranchOptions, MilpProblem, MilpSolution, MilpStatus, Relation, Sense, VarId,
    DEFAULT_GAP, INTEGRALITY_TOL,
};
use crate::risk::RiskWindow;

/// Tolerance for physical and logical invariants of decoded schedules.
pub const SCHEDULE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RestorationBudget {
    /// Same mileage every day; `f64::INFINITY` removes the limit.
    Uniform(f64),
    /// Mileage per study day.
    PerDay(Vec<f64>),
}

impl RestorationBudget {
    pub fn for_day(&self, day: usize) -> Option<f64> {
        match self {
            RestorationBudget::Uniform(y) => Some(*y),
            RestorationBudget::PerDay(v) => v.get(day).copied(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MopsarParams {
    /// Weight on risk reduction versus load served, in `[0, 1]`.
    pub alpha: f64,
    /// Risk level above which switching a line off pays off.
    pub risk_threshold: f64,
    /// Miles of line that can be inspected and re-energized per day.
    pub restoration_budget: RestorationBudget,
    /// Relative optimality gap for each solve.
    pub gap: f64,
    /// Angle span (radians) used for the flow/angle decoupling constants,
    /// `M = |b| * span`.
    pub big_m_angle_span: f64,
}

impl Default for MopsarParams {
    fn default() -> Self {
        MopsarParams {
            alpha: 0.7,
            risk_threshold: 100.0,
            restoration_budget: RestorationBudget::Uniform(75.0),
            gap: DEFAULT_GAP,
            big_m_angle_span: 2.0 * PI / 3.0,
        }
    }
}

impl MopsarParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::Degenerate(m));
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(self.risk_threshold >= 0.0 && self.risk_threshold.is_finite()) {
            return bad(format!(
                "risk threshold must be non-negative, got {}",
                self.risk_threshold
            ));
        }
        let budgets: Vec<f64> = match &self.restoration_budget {
            RestorationBudget::Uniform(y) => vec![*y],
            RestorationBudget::PerDay(v) => v.clone(),
        };
        if budgets.iter().any(|y| !(*y >= 0.0)) {
            return bad("restoration budget must be non-negative".into());
        }
        if !(self.gap >= 0.0) {
            return bad(format!("gap must be non-negative, got {}", self.gap));
        }
        if !(self.big_m_angle_span > 0.0 && self.big_m_angle_span.is_finite()) {
            return bad("big_m_angle_span must be positive".into());
        }
        Ok(())
    }
}

/// Variable handles of a built model, indexed `[period][element]`.
#[derive(Debug, Clone)]
pub struct ModelIndex {
    pub days: Vec<usize>,
    pub initial_status: Vec<bool>,
    pub z: Vec<Vec<VarId>>,
    pub y: Vec<Vec<VarId>>,
    pub x: Vec<Vec<VarId>>,
    pub pg: Vec<Vec<VarId>>,
    pub pl: Vec<Vec<VarId>>,
    pub theta: Vec<Vec<VarId>>,
}

#[derive(Debug, Clone)]
pub struct MopsarModel {
    pub problem: MilpProblem,
    pub index: ModelIndex,
    /// Total demand over the window, MW.
    pub d_tot: f64,
    /// Total risk over the window with every line energized.
    pub r_tot: f64,
}

/// Builds the shutoff and restoration program for one risk window.
///
/// `initial_status[l]` is the status of line `l` at the end of the day before
/// the window (true = energized).
pub fn build_mopsar(
    net: &Network,
    window: &RiskWindow,
    initial_status: &[bool],
    params: &MopsarParams,
) -> Result<MopsarModel, ModelError> {
    params.validate()?;
    let n_lines = net.lines.len();
    if window.rows.is_empty() {
        return Err(ModelError::Degenerate("risk window has no periods".into()));
    }
    if window.rows.iter().any(|r| r.len() != n_lines) {
        return Err(ModelError::Degenerate(
            "risk window rows do not match the line count".into(),
        ));
    }
    if initial_status.len() != n_lines {
        return Err(ModelError::Degenerate(format!(
            "initial status covers {} of {n_lines} lines",
            initial_status.len()
        )));
    }
    let days: Vec<usize> = window.days().collect();
    if let Some(d) = days.iter().find(|d| **d >= net.num_days) {
        return Err(ModelError::Degenerate(format!(
            "window day {d} beyond the study window"
        )));
    }
    let d_tot: f64 = days.iter().map(|d| net.total_demand(*d)).sum();
    if d_tot <= 0.0 {
        return Err(ModelError::Degenerate("total demand over the window is zero".into()));
    }
    let r_tot = window.total();
    let base = net.base_mva;
    let bus_of = net.bus_index();
    let ref_bus = net.reference_bus();
    let alpha = params.alpha;
    let v = params.risk_threshold;

    let mut p = MilpProblem::new(Sense::Maximize);
    let mut index = ModelIndex {
        days: days.clone(),
        initial_status: initial_status.to_vec(),
        z: Vec::new(),
        y: Vec::new(),
        x: Vec::new(),
        pg: Vec::new(),
        pl: Vec::new(),
        theta: Vec::new(),
    };

    for (k, &day) in days.iter().enumerate() {
        let mut z = Vec::with_capacity(n_lines);
        let mut y = Vec::with_capacity(n_lines);
        for (l, line) in net.lines.iter().enumerate() {
            let zv = p.add_binary(format!("z_{}_{day}", line.id))?;
            if r_tot > 0.0 {
                p.set_objective(zv, -alpha * (window.rows[k][l] - v) / r_tot)?;
            }
            z.push(zv);
        }
        for line in &net.lines {
            y.push(p.add_continuous(format!("y_{}_{day}", line.id), 0.0, 1.0)?);
        }
        let mut x = Vec::with_capacity(net.loads.len());
        for load in &net.loads {
            let xv = p.add_continuous(format!("x_{}_{day}", load.id), 0.0, 1.0)?;
            p.set_objective(xv, (1.0 - alpha) * load.weight * load.demand_profile[day] / d_tot)?;
            x.push(xv);
        }
        let mut pg = Vec::with_capacity(net.generators.len());
        for gen in &net.generators {
            pg.push(p.add_continuous(format!("pg_{}_{day}", gen.id), 0.0, gen.pmax_profile[day] / base)?);
        }
        let mut pl = Vec::with_capacity(n_lines);
        for line in &net.lines {
            pl.push(p.add_continuous(format!("pl_{}_{day}", line.id), f64::NEG_INFINITY, f64::INFINITY)?);
        }
        let mut theta = Vec::with_capacity(net.buses.len());
        for (b, bus) in net.buses.iter().enumerate() {
            let (lo, hi) = if b == ref_bus {
                (0.0, 0.0)
            } else {
                (f64::NEG_INFINITY, f64::INFINITY)
            };
            theta.push(p.add_continuous(format!("th_{}_{day}", bus.id), lo, hi)?);
        }
        index.z.push(z);
        index.y.push(y);
        index.x.push(x);
        index.pg.push(pg);
        index.pl.push(pl);
        index.theta.push(theta);
    }

    for (k, &day) in days.iter().enumerate() {
        let (z, y, pl, th) = (&index.z[k], &index.y[k], &index.pl[k], &index.theta[k]);

        // Restoration indicator: y = (not z_prev) and z.
        for (l, line) in net.lines.iter().enumerate() {
            let id = &line.id;
            if k == 0 {
                let z0 = if initial_status[l] { 1.0 } else { 0.0 };
                p.add_constraint(format!("resto_off_{id}_{day}"), [(y[l], 1.0)], Relation::Le, 1.0 - z0)?;
                p.add_constraint(
                    format!("resto_on_{id}_{day}"),
                    [(y[l], 1.0), (z[l], -1.0)],
                    Relation::Le,
                    0.0,
                )?;
                p.add_constraint(
                    format!("resto_and_{id}_{day}"),
                    [(y[l], 1.0), (z[l], -1.0)],
                    Relation::Ge,
                    -z0,
                )?;
            } else {
                let zp = index.z[k - 1][l];
                p.add_constraint(
                    format!("resto_off_{id}_{day}"),
                    [(y[l], 1.0), (zp, 1.0)],
                    Relation::Le,
                    1.0,
                )?;
                p.add_constraint(
                    format!("resto_on_{id}_{day}"),
                    [(y[l], 1.0), (z[l], -1.0)],
                    Relation::Le,
                    0.0,
                )?;
                p.add_constraint(
                    format!("resto_and_{id}_{day}"),
                    [(y[l], 1.0), (z[l], -1.0), (zp, 1.0)],
                    Relation::Ge,
                    0.0,
                )?;
            }
        }
        let budget = params
            .restoration_budget
            .for_day(day)
            .ok_or_else(|| ModelError::Degenerate(format!("no restoration budget for day {day}")))?;
        if budget.is_finite() {
            p.add_constraint(
                format!("budget_{day}"),
                net.lines.iter().enumerate().map(|(l, line)| (y[l], line.length_miles)),
                Relation::Le,
                budget,
            )?;
        }

        // Nodal balance: generation - served load - outgoing + incoming flow = 0.
        let mut rows: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); net.buses.len()];
        for (g, gen) in net.generators.iter().enumerate() {
            rows[bus_of[gen.bus.as_str()]].push((index.pg[k][g], 1.0));
        }
        for (d, load) in net.loads.iter().enumerate() {
            rows[bus_of[load.bus.as_str()]].push((index.x[k][d], -load.demand_profile[day] / base));
        }
        for (l, line) in net.lines.iter().enumerate() {
            rows[bus_of[line.from_bus.as_str()]].push((pl[l], -1.0));
            rows[bus_of[line.to_bus.as_str()]].push((pl[l], 1.0));
        }
        for (b, terms) in rows.into_iter().enumerate() {
            p.add_constraint(format!("balance_{}_{day}", net.buses[b].id), terms, Relation::Eq, 0.0)?;
        }

        for (l, line) in net.lines.iter().enumerate() {
            let id = &line.id;
            let cap = line.thermal_limit / base;
            p.add_constraint(
                format!("thermal_hi_{id}_{day}"),
                [(pl[l], 1.0), (z[l], -cap)],
                Relation::Le,
                0.0,
            )?;
            p.add_constraint(
                format!("thermal_lo_{id}_{day}"),
                [(pl[l], 1.0), (z[l], cap)],
                Relation::Ge,
                0.0,
            )?;
            // pl = -b (th_i - th_j) when energized, free within +-M otherwise.
            let b = line.susceptance_b;
            let m = b.abs() * params.big_m_angle_span;
            let (ti, tj) = (th[bus_of[line.from_bus.as_str()]], th[bus_of[line.to_bus.as_str()]]);
            p.add_constraint(
                format!("angle_hi_{id}_{day}"),
                [(pl[l], 1.0), (ti, b), (tj, -b), (z[l], m)],
                Relation::Le,
                m,
            )?;
            p.add_constraint(
                format!("angle_lo_{id}_{day}"),
                [(pl[l], 1.0), (ti, b), (tj, -b), (z[l], -m)],
                Relation::Ge,
                -m,
            )?;
        }
    }

    Ok(MopsarModel {
        problem: p,
        index,
        d_tot,
        r_tot,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ObjectiveComponents {
    /// Weighted load served, MW summed over periods.
    pub d_served: f64,
    /// Risk of energized lines.
    pub r_fire: f64,
    /// Threshold penalty of de-energized lines.
    pub v_system: f64,
    /// Normalized objective in threshold form (constant offset dropped).
    pub objective: f64,
}

/// Recomputes the objective terms from statuses and served fractions.
/// `status[k][line]`, `served[k][load]` and `risk[k][line]` are aligned with
/// the study days in `days`.
pub fn evaluate_objective(
    net: &Network,
    days: &[usize],
    status: &[Vec<bool>],
    served: &[Vec<f64>],
    risk: &[Vec<f64>],
    params: &MopsarParams,
) -> ObjectiveComponents {
    let mut c = ObjectiveComponents::default();
    let mut d_tot = 0.0;
    let mut r_tot = 0.0;
    let mut threshold_sum = 0.0;
    for (k, &day) in days.iter().enumerate() {
        for (d, load) in net.loads.iter().enumerate() {
            c.d_served += served[k][d] * load.weight * load.demand_profile[day];
            d_tot += load.demand_profile[day];
        }
        for (l, &on) in status[k].iter().enumerate() {
            let r = risk[k][l];
            r_tot += r;
            if on {
                c.r_fire += r;
                threshold_sum += r - params.risk_threshold;
            } else {
                c.v_system += params.risk_threshold;
            }
        }
    }
    let alpha = params.alpha;
    c.objective = if d_tot > 0.0 {
        (1.0 - alpha) * c.d_served / d_tot
    } else {
        0.0
    };
    if r_tot > 0.0 {
        c.objective -= alpha * threshold_sum / r_tot;
    }
    c
}

/// Objective terms of a decoded schedule against its risk window.
pub fn objective_components(
    schedule: &ShutoffSchedule,
    window: &RiskWindow,
    params: &MopsarParams,
    net: &Network,
) -> ObjectiveComponents {
    evaluate_objective(
        net,
        &schedule.days,
        &schedule.status,
        &schedule.served,
        &window.rows,
        params,
    )
}

/// Decoded optimal actions for every period of a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShutoffSchedule {
    pub days: Vec<usize>,
    /// `status[k][line]`: energized.
    pub status: Vec<Vec<bool>>,
    /// `restored[k][line]`: re-energized at the start of period `k`.
    pub restored: Vec<Vec<bool>>,
    /// Served fraction per load.
    pub served: Vec<Vec<f64>>,
    /// Generator output, per-unit.
    pub generation: Vec<Vec<f64>>,
    /// Line flow from `from_bus` to `to_bus`, per-unit.
    pub flow: Vec<Vec<f64>>,
    /// Bus voltage angle, radians.
    pub angle: Vec<Vec<f64>>,
    pub components: ObjectiveComponents,
}

/// Turns a solver assignment back into a schedule, verifying integrality,
/// the restoration logic, the restoration budget and every model row.
pub fn extract_schedule(
    solution: &MilpSolution,
    model: &MopsarModel,
    net: &Network,
    window: &RiskWindow,
    params: &MopsarParams,
) -> Result<ShutoffSchedule, ModelError> {
    if solution.status == MilpStatus::Infeasible {
        return Err(ModelError::Decode("solution is infeasible".into()));
    }
    let values = solution
        .assignment
        .as_deref()
        .ok_or_else(|| ModelError::Decode("solution carries no assignment".into()))?;
    let idx = &model.index;
    let pick = |vars: &Vec<Vec<VarId>>| -> Vec<Vec<f64>> {
        vars.iter()
            .map(|row| row.iter().map(|v| values[v.0]).collect())
            .collect()
    };

    let mut status = Vec::with_capacity(idx.days.len());
    for (k, row) in idx.z.iter().enumerate() {
        let mut s = Vec::with_capacity(row.len());
        for (l, v) in row.iter().enumerate() {
            let z = values[v.0];
            if (z - z.round()).abs() > INTEGRALITY_TOL {
                return Err(ModelError::Decode(format!(
                    "status of line `{}` on day {} is fractional ({z})",
                    net.lines[l].id, idx.days[k]
                )));
            }
            s.push(z.round() >= 1.0);
        }
        status.push(s);
    }

    let mut restored = Vec::with_capacity(status.len());
    for (k, s) in status.iter().enumerate() {
        let prev = if k == 0 { &idx.initial_status } else { &status[k - 1] };
        let logic: Vec<bool> = s.iter().zip(prev).map(|(now, before)| *now && !*before).collect();
        let mut miles = 0.0;
        for (l, &r) in logic.iter().enumerate() {
            let y = values[idx.y[k][l].0];
            let expect = if r { 1.0 } else { 0.0 };
            if (y - expect).abs() > SCHEDULE_TOL {
                return Err(ModelError::Decode(format!(
                    "restoration indicator of line `{}` on day {} is {y}, expected {expect}",
                    net.lines[l].id, idx.days[k]
                )));
            }
            if r {
                miles += net.lines[l].length_miles;
            }
        }
        let budget = params.restoration_budget.for_day(idx.days[k]).unwrap_or(f64::INFINITY);
        if miles > budget + SCHEDULE_TOL {
            return Err(ModelError::Decode(format!(
                "day {} restores {miles} miles, budget {budget}",
                idx.days[k]
            )));
        }
        restored.push(logic);
    }

    let report = check_solution(&model.problem, values)?;
    if !report.feasible {
        let first = &report.violations[0];
        return Err(ModelError::Decode(format!(
            "assignment violates `{}` by {}",
            first.name, first.amount
        )));
    }

    let served = pick(&idx.x);
    let components = evaluate_objective(net, &idx.days, &status, &served, &window.rows, params);
    Ok(ShutoffSchedule {
        days: idx.days.clone(),
        status,
        restored,
        served,
        generation: pick(&idx.pg),
        flow: pick(&idx.pl),
        angle: pick(&idx.theta),
        components,
    })
}

/// Solves the window to `params.gap` and decodes the result.
pub fn solve_window(
    net: &Network,
    window: &RiskWindow,
    initial_status: &[bool],
    params: &MopsarParams,
    opts: &BranchOptions,
) -> Result<(ShutoffSchedule, MilpSolution), ModelError> {
    let model = build_mopsar(net, window, initial_status, params)?;
    let solution = branch_and_bound(&model.problem, opts)?;
    if solution.status == MilpStatus::Infeasible {
        return Err(crate::error::SolveError::Infeasible.into());
    }
    let schedule = extract_schedule(&solution, &model, net, window, params)?;
    Ok((schedule, solution))
}

/// Largest weighted load (MW) servable on `day` with line statuses fixed.
/// Returns the served MW (unweighted) of that dispatch.
pub fn max_served_load(net: &Network, day: usize, status: &[bool], params: &MopsarParams) -> Result<f64, ModelError> {
    let window = RiskWindow {
        first_day: day,
        rows: vec![vec![0.0; net.lines.len()]],
        clamped: false,
    };
    let load_only = MopsarParams {
        alpha: 0.0,
        restoration_budget: RestorationBudget::Uniform(f64::INFINITY),
        ..params.clone()
    };
    let mut model = build_mopsar(net, &window, status, &load_only)?;
    for (l, z) in model.index.z[0].clone().into_iter().enumerate() {
        let v = if status[l] { 1.0 } else { 0.0 };
        model.problem = model.problem.with_bounds(z, v, v);
    }
    let lp = crate::milp::solve_lp(&model.problem)?;
    Ok(net
        .loads
        .iter()
        .zip(&model.index.x[0])
        .map(|(load, x)| lp.values[x.0] * load.demand_profile[day])
        .sum())
}
