//! Brute-force rolling-horizon policy: every status path of each window is
//! scored with an independently built per-day dispatch LP.

use gridshutoff::grid::Network;
use gridshutoff::milp::{MilpProblem, Relation, Sense};
use gridshutoff::model::MopsarParams;

use super::simplex;

/// Most weighted load (MW) servable on `day` with the given statuses. Open
/// lines are simply left out of the network.
pub fn best_dispatch(net: &Network, day: usize, status: &[bool]) -> (f64, f64) {
    let base = net.base_mva;
    let mut p = MilpProblem::new(Sense::Maximize);
    let bus = |id: &str| net.buses.iter().position(|b| b.id == id).unwrap();
    let theta: Vec<_> = net
        .buses
        .iter()
        .map(|b| {
            let fixed = b.is_reference;
            p.add_continuous(
                format!("t{}", b.id),
                if fixed { 0.0 } else { -1e3 },
                if fixed { 0.0 } else { 1e3 },
            )
            .unwrap()
        })
        .collect();
    let x: Vec<_> = net
        .loads
        .iter()
        .map(|d| {
            let v = p.add_continuous(format!("x{}", d.id), 0.0, 1.0).unwrap();
            p.set_objective(v, d.weight * d.demand_profile[day]).unwrap();
            v
        })
        .collect();
    let g: Vec<_> = net
        .generators
        .iter()
        .map(|gen| {
            p.add_continuous(format!("g{}", gen.id), 0.0, gen.pmax_profile[day] / base)
                .unwrap()
        })
        .collect();
    let mut balance: Vec<Vec<(gridshutoff::milp::VarId, f64)>> = vec![Vec::new(); net.buses.len()];
    for (k, gen) in net.generators.iter().enumerate() {
        balance[bus(&gen.bus)].push((g[k], 1.0));
    }
    for (k, d) in net.loads.iter().enumerate() {
        balance[bus(&d.bus)].push((x[k], -d.demand_profile[day] / base));
    }
    for (l, line) in net.lines.iter().enumerate() {
        if !status[l] {
            continue;
        }
        let (i, j) = (bus(&line.from_bus), bus(&line.to_bus));
        // flow i->j = -b (ti - tj)
        let b = line.susceptance_b;
        balance[i].push((theta[i], b));
        balance[i].push((theta[j], -b));
        balance[j].push((theta[i], -b));
        balance[j].push((theta[j], b));
        let cap = line.thermal_limit / base;
        p.add_constraint(format!("cap+{l}"), [(theta[i], -b), (theta[j], b)], Relation::Le, cap)
            .unwrap();
        p.add_constraint(format!("cap-{l}"), [(theta[i], -b), (theta[j], b)], Relation::Ge, -cap)
            .unwrap();
    }
    for (i, terms) in balance.into_iter().enumerate() {
        p.add_constraint(format!("bal{i}"), terms, Relation::Eq, 0.0).unwrap();
    }
    match simplex::solve(&p, &[]) {
        simplex::Outcome::Optimal { objective, x: values } => {
            let served: f64 = net
                .loads
                .iter()
                .zip(&x)
                .map(|(d, v)| values[v.0] * d.demand_profile[day])
                .sum();
            (objective, served)
        }
        other => panic!("dispatch LP failed: {other:?}"),
    }
}

pub struct OracleDay {
    pub status: Vec<bool>,
    pub served_mw: f64,
}

pub struct OracleRun {
    pub days: Vec<OracleDay>,
    pub realized_objective: f64,
    /// Smallest margin between the chosen window plan and the runner-up.
    pub min_margin: f64,
}

/// `forecast(issue, target) -> risk per line`; `realized(day)`.
pub fn rolling_oracle(
    net: &Network,
    forecast: &dyn Fn(usize, usize) -> Vec<f64>,
    params: &MopsarParams,
    horizon: usize,
    initial: &[bool],
) -> OracleRun {
    let n = net.lines.len();
    let days = net.num_days;
    let mut prev = initial.to_vec();
    let mut out = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut cache = std::collections::HashMap::new();
    let mut dispatch = |day: usize, s: &[bool]| {
        *cache
            .entry((day, s.to_vec()))
            .or_insert_with(|| best_dispatch(net, day, s))
    };

    for t in 0..days {
        let last = (t + horizon).min(days - 1);
        let periods = last - t + 1;
        let risk: Vec<Vec<f64>> = (t..=last).map(|d| forecast(t, d)).collect();
        let d_tot: f64 = (t..=last).map(|d| net.total_demand(d)).sum();
        let r_tot: f64 = risk.iter().flatten().sum();
        let mut scores: Vec<(f64, Vec<Vec<bool>>)> = Vec::new();
        for mask in 0u64..(1 << (n * periods)) {
            let path: Vec<Vec<bool>> = (0..periods)
                .map(|k| (0..n).map(|l| (mask >> (k * n + l)) & 1 == 1).collect())
                .collect();
            let mut ok = true;
            for k in 0..periods {
                let before = if k == 0 { &prev } else { &path[k - 1] };
                let miles: f64 = (0..n)
                    .filter(|&l| path[k][l] && !before[l])
                    .map(|l| net.lines[l].length_miles)
                    .sum();
                if miles > params.restoration_budget.for_day(t + k).unwrap() + 1e-9 {
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            let mut score = 0.0;
            for k in 0..periods {
                let (weighted, _) = dispatch(t + k, &path[k]);
                score += (1.0 - params.alpha) * weighted / d_tot;
                if r_tot > 0.0 {
                    for l in 0..n {
                        if path[k][l] {
                            score -= params.alpha * (risk[k][l] - params.risk_threshold) / r_tot;
                        }
                    }
                }
            }
            scores.push((score, path));
        }
        scores.sort_by(|a, b| b.0.total_cmp(&a.0));
        // only the committed first day has to be unique
        if let Some(rival) = scores.iter().find(|s| s.1[0] != scores[0].1[0]) {
            min_margin = min_margin.min(scores[0].0 - rival.0);
        }
        let chosen = scores[0].1[0].clone();
        let (_, served_mw) = dispatch(t, &chosen);
        out.push(OracleDay {
            status: chosen.clone(),
            served_mw,
        });
        prev = chosen;
    }

    let d_all: f64 = (0..days).map(|d| net.total_demand(d)).sum();
    let r_all: f64 = (0..days).map(|d| forecast(d, d).iter().sum::<f64>()).sum();
    let mut realized_objective = 0.0;
    for (d, day) in out.iter().enumerate() {
        let (weighted, _) = dispatch(d, &day.status);
        realized_objective += (1.0 - params.alpha) * weighted / d_all;
        let real = forecast(d, d);
        for l in 0..n {
            if day.status[l] && r_all > 0.0 {
                realized_objective -= params.alpha * (real[l] - params.risk_threshold) / r_all;
            }
        }
    }
    OracleRun {
        days: out,
        realized_objective,
        min_margin,
    }
}
