//! Shared helpers for integration tests: random instances and independent
//! oracles (dense simplex, enumeration, MPS reader, physics checks).
#![allow(dead_code)]

pub mod mps_reader;
pub mod rolling;
pub mod simplex;

use gridshutoff::grid::{Bus, Generator, Line, Load, Network};
use gridshutoff::milp::MilpProblem;
use gridshutoff::model::{MopsarParams, ShutoffSchedule};
use gridshutoff::risk::RiskWindow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub net: Network,
    /// `risk[day][line]`
    pub risk: Vec<Vec<f64>>,
    pub initial: Vec<bool>,
}

impl Instance {
    pub fn window(&self) -> RiskWindow {
        RiskWindow {
            first_day: 0,
            rows: self.risk.clone(),
            clamped: false,
        }
    }
}

pub struct Shape {
    pub max_buses: usize,
    pub max_lines: usize,
    pub max_days: usize,
    /// Only tree networks (no parallel paths).
    pub radial: bool,
    pub random_initial: bool,
}

pub const SMALL: Shape = Shape {
    max_buses: 4,
    max_lines: 4,
    max_days: 3,
    radial: false,
    random_initial: true,
};

/// Connected random network: a spanning tree plus extra lines.
pub fn random_instance(seed: u64, shape: &Shape) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = rng.random_range(2..=shape.max_buses);
    let tree = nb - 1;
    let nl = if shape.radial {
        tree
    } else {
        rng.random_range(tree..=shape.max_lines.max(tree))
    };
    let days = rng.random_range(1..=shape.max_days);
    let buses: Vec<Bus> = (0..nb)
        .map(|i| Bus {
            id: format!("b{i}"),
            name: String::new(),
            lat: 34.0 + 0.1 * i as f64,
            lon: -118.0,
            is_reference: i == 0,
        })
        .collect();
    let mut lines = Vec::new();
    for l in 0..nl {
        let (f, t) = if l < tree {
            (rng.random_range(0..=l), l + 1)
        } else {
            let f = rng.random_range(0..nb);
            let mut t = rng.random_range(0..nb - 1);
            if t >= f {
                t += 1;
            }
            (f, t)
        };
        lines.push(Line {
            id: format!("L{l}"),
            from_bus: format!("b{f}"),
            to_bus: format!("b{t}"),
            susceptance_b: -rng.random_range(2.0..20.0),
            thermal_limit: rng.random_range(20.0..150.0),
            length_miles: rng.random_range(5.0..60.0),
            polyline: vec![],
        });
    }
    let mut generators = Vec::new();
    let mut loads = Vec::new();
    for i in 0..nb {
        if i == 0 || rng.random_bool(0.3) {
            let cap = rng.random_range(50.0..250.0);
            generators.push(Generator {
                id: format!("g{i}"),
                bus: format!("b{i}"),
                pmax_profile: (0..days).map(|_| cap * rng.random_range(0.8..1.0)).collect(),
                base_pmax: cap,
            });
        }
        if i > 0 || rng.random_bool(0.2) {
            loads.push(Load {
                id: format!("d{i}"),
                bus: format!("b{i}"),
                demand_profile: (0..days).map(|_| rng.random_range(10.0..120.0)).collect(),
                weight: if rng.random_bool(0.3) { 2.0 } else { 1.0 },
            });
        }
    }
    if loads.is_empty() {
        loads.push(Load {
            id: "d0".into(),
            bus: "b0".into(),
            demand_profile: vec![50.0; days],
            weight: 1.0,
        });
    }
    let risk = (0..days)
        .map(|_| (0..nl).map(|_| rng.random_range(0.0..250.0)).collect())
        .collect();
    let initial = (0..nl).map(|_| !shape.random_initial || rng.random_bool(0.7)).collect();
    let net = Network::new(days, 100.0, buses, lines, generators, loads).expect("valid random network");
    Instance { net, risk, initial }
}

pub struct Enumeration {
    pub objective: f64,
    pub patterns: u64,
    pub feasible: u64,
}

/// Exhaustive search over every 0/1 pattern of the integer variables, each
/// completed by the dense-simplex LP.
pub fn enumerate(p: &MilpProblem) -> Option<Enumeration> {
    let ints: Vec<usize> = p.integer_vars().map(|v| v.0).collect();
    assert!(ints.len() <= 16, "too many binaries to enumerate");
    let maximize = p.sense() == gridshutoff::milp::Sense::Maximize;
    let mut best: Option<f64> = None;
    let mut feasible = 0;
    let total = 1u64 << ints.len();
    for mask in 0..total {
        let fix: Vec<(usize, f64, f64)> = ints
            .iter()
            .enumerate()
            .map(|(k, &j)| {
                let v = ((mask >> k) & 1) as f64;
                (j, v, v)
            })
            .collect();
        if let simplex::Outcome::Optimal { objective, .. } = simplex::solve(p, &fix) {
            feasible += 1;
            let better = match best {
                None => true,
                Some(b) => (maximize && objective > b) || (!maximize && objective < b),
            };
            if better {
                best = Some(objective);
            }
        }
    }
    best.map(|objective| Enumeration {
        objective,
        patterns: total,
        feasible,
    })
}

/// Largest violation of DC physics in a schedule: nodal balance, thermal
/// limits, flow-angle coupling on energized lines, zero flow on open lines.
pub fn physics_residual(net: &Network, s: &ShutoffSchedule) -> f64 {
    let base = net.base_mva;
    let mut worst = 0.0_f64;
    let bus = |id: &str| net.buses.iter().position(|b| b.id == id).unwrap();
    for (k, &day) in s.days.iter().enumerate() {
        let mut balance = vec![0.0; net.buses.len()];
        for (g, gen) in net.generators.iter().enumerate() {
            let pg = s.generation[k][g];
            worst = worst.max(-pg).max(pg - gen.pmax_profile[day] / base);
            balance[bus(&gen.bus)] += pg;
        }
        for (d, load) in net.loads.iter().enumerate() {
            let x = s.served[k][d];
            worst = worst.max(-x).max(x - 1.0);
            balance[bus(&load.bus)] -= x * load.demand_profile[day] / base;
        }
        for (l, line) in net.lines.iter().enumerate() {
            let f = s.flow[k][l];
            let (i, j) = (bus(&line.from_bus), bus(&line.to_bus));
            balance[i] -= f;
            balance[j] += f;
            if s.status[k][l] {
                worst = worst.max(f.abs() - line.thermal_limit / base);
                let expect = -line.susceptance_b * (s.angle[k][i] - s.angle[k][j]);
                worst = worst.max((f - expect).abs());
            } else {
                worst = worst.max(f.abs());
            }
        }
        for r in balance {
            worst = worst.max(r.abs());
        }
        let reference = net.buses.iter().position(|b| b.is_reference).unwrap();
        worst = worst.max(s.angle[k][reference].abs());
    }
    worst
}

/// Checks restoration indicators against status transitions and the budget.
/// Returns a description of the first problem found.
pub fn restoration_problem(
    net: &Network,
    s: &ShutoffSchedule,
    initial: &[bool],
    params: &MopsarParams,
) -> Option<String> {
    for (k, &day) in s.days.iter().enumerate() {
        let prev = if k == 0 {
            initial.to_vec()
        } else {
            s.status[k - 1].clone()
        };
        let mut miles = 0.0;
        for l in 0..net.lines.len() {
            let y = (s.status[k][l] as i32 - prev[l] as i32).max(0) == 1;
            if y != s.restored[k][l] {
                return Some(format!("day {day} line {l}: y mismatch"));
            }
            if y {
                miles += net.lines[l].length_miles;
            }
        }
        let budget = params.restoration_budget.for_day(day).unwrap();
        if miles > budget + 1e-9 {
            return Some(format!("day {day}: {miles} miles over budget {budget}"));
        }
    }
    None
}
