//! Best-bound-first branch and bound over the LP relaxation.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::time::{Duration, Instant};

use log::debug;
use serde::{Deserialize, Serialize};

use super::lp::Relaxation;
use super::problem::{MilpProblem, VarId};
use crate::error::SolveError;

pub const INTEGRALITY_TOL: f64 = 1e-6;
pub const DEFAULT_GAP: f64 = 1e-4;
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;
/// Solved relaxations kept for re-use by child nodes.
const WARM_CACHE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MilpStatus {
    OptimalWithinGap,
    Infeasible,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct BranchOptions {
    /// Relative optimality gap at which the search stops.
    pub gap: f64,
    /// Maximum number of tree nodes whose relaxation is solved.
    pub node_budget: u64,
    /// Optional wall-clock cap. Results hitting it are not reproducible.
    pub time_limit: Option<Duration>,
    /// Run a rounding dive from the root relaxation to seed an incumbent.
    pub root_dive: bool,
    /// Repeat the dive from every n-th evaluated node; 0 disables.
    pub dive_interval: u64,
}

impl Default for BranchOptions {
    fn default() -> Self {
        BranchOptions {
            gap: DEFAULT_GAP,
            node_budget: DEFAULT_NODE_BUDGET,
            time_limit: None,
            root_dive: true,
            dive_interval: 500,
        }
    }
}

impl BranchOptions {
    pub fn with_gap(gap: f64) -> Self {
        BranchOptions {
            gap,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Best integer-feasible assignment found, if any.
    pub assignment: Option<Vec<f64>>,
    /// Objective of `assignment`, including the offset.
    pub objective_value: Option<f64>,
    /// Proven bound on the optimum (upper bound when maximizing).
    pub best_bound: Option<f64>,
    /// `|best_bound - objective| / max(|objective|, 1e-9)`; infinite without
    /// an incumbent.
    pub gap: f64,
    pub node_count: u64,
    pub lp_count: u64,
    pub wall_time: f64,
}

impl MilpSolution {
    pub fn has_incumbent(&self) -> bool {
        self.assignment.is_some()
    }
}

pub fn relative_gap(bound: f64, incumbent: f64) -> f64 {
    (bound - incumbent).abs() / incumbent.abs().max(1e-9)
}

#[derive(Debug)]
struct Node {
    bound: f64,
    depth: usize,
    id: u64,
    /// Node whose solved relaxation may be cached for warm starting.
    parent: Option<u64>,
    /// Sorted by variable index.
    bounds: Vec<(usize, f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: larger bound first, then deeper, then older.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

impl Node {
    fn is_fix_only(&self) -> bool {
        self.bounds.iter().all(|(_, lo, hi)| lo == hi)
    }

    fn child(&self, var: usize, lo: f64, hi: f64, bound: f64, id: u64, parent: Option<u64>) -> Node {
        let mut bounds = self.bounds.clone();
        match bounds.binary_search_by_key(&var, |b| b.0) {
            Ok(k) => bounds[k] = (var, lo, hi),
            Err(k) => bounds.insert(k, (var, lo, hi)),
        }
        Node {
            bound,
            depth: self.depth + 1,
            id,
            parent,
            bounds,
        }
    }
}

struct Search<'a> {
    problem: &'a MilpProblem,
    sign: f64,
    integers: Vec<usize>,
    warm: Option<Relaxation>,
    /// Node id whose state `warm` holds, when it belongs to a tree node.
    warm_for: Option<u64>,
    cache: HashMap<u64, Relaxation>,
    cache_order: VecDeque<u64>,
    lp_count: u64,
}

enum Evaluated {
    Infeasible,
    Solved { values: Vec<f64>, objective: f64 },
}

impl<'a> Search<'a> {
    fn cold(&mut self, bounds: &[(usize, f64, f64)]) -> Result<Evaluated, SolveError> {
        self.lp_count += 1;
        match Relaxation::cold(self.problem, bounds) {
            Ok(lp) => {
                let out = Evaluated::Solved {
                    values: lp.values(),
                    objective: lp.internal_objective(),
                };
                if bounds.iter().all(|(_, lo, hi)| lo == hi) {
                    self.warm = Some(lp);
                }
                Ok(out)
            }
            Err(SolveError::Infeasible) => Ok(Evaluated::Infeasible),
            Err(e) => Err(e),
        }
    }

    /// Moves the warm relaxation to the fixings of `node`.
    fn warm(&mut self, node: &Node) -> Result<Option<Evaluated>, SolveError> {
        let cached = node.parent.and_then(|p| self.cache.get(&p));
        let Some(base) = cached.or(self.warm.as_ref()) else {
            return Ok(None);
        };
        let mut lp = base.clone();
        let release: Vec<usize> = lp
            .fixes()
            .iter()
            .filter(|(v, val)| !node.bounds.iter().any(|(u, lo, _)| u == *v && lo == *val))
            .map(|(v, _)| *v)
            .collect();
        for v in release {
            self.lp_count += 1;
            lp = match lp.unfix(VarId(v)) {
                Ok(lp) => lp,
                Err(e) => {
                    debug!("warm unfix failed ({e}); falling back to a cold solve");
                    return Ok(None);
                }
            };
        }
        for &(v, val, _) in &node.bounds {
            if lp.fixes().get(&v) == Some(&val) {
                continue;
            }
            self.lp_count += 1;
            lp = match lp.fix(VarId(v), val) {
                Ok(lp) => lp,
                // The engine's dual re-solve occasionally reports spurious
                // infeasibility after a fix; only a cold solve may prune.
                Err(SolveError::Infeasible) => return Ok(None),
                Err(e) => {
                    debug!("warm fix failed ({e}); falling back to a cold solve");
                    return Ok(None);
                }
            };
        }
        let out = Evaluated::Solved {
            values: lp.values(),
            objective: lp.internal_objective(),
        };
        self.warm = Some(lp);
        Ok(Some(out))
    }

    fn evaluate(&mut self, node: &Node) -> Result<Evaluated, SolveError> {
        self.warm_for = None;
        if node.is_fix_only() {
            if let Some(done) = self.warm(node)? {
                self.warm_for = Some(node.id);
                return Ok(done);
            }
        }
        let out = self.cold(&node.bounds)?;
        if node.is_fix_only() && matches!(out, Evaluated::Solved { .. }) {
            self.warm_for = Some(node.id);
        }
        Ok(out)
    }

    /// Keeps the relaxation of the node just evaluated for its children.
    fn remember(&mut self, id: u64) {
        if self.warm_for != Some(id) {
            return;
        }
        if let Some(lp) = &self.warm {
            if self.cache_order.len() >= WARM_CACHE {
                if let Some(old) = self.cache_order.pop_front() {
                    self.cache.remove(&old);
                }
            }
            self.cache.insert(id, lp.clone());
            self.cache_order.push_back(id);
        }
    }

    /// Most fractional integer variable, ties to the lowest index.
    fn branching_var(&self, values: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &j in &self.integers {
            let f = values[j] - values[j].floor();
            let dist = f.min(1.0 - f);
            if dist > INTEGRALITY_TOL && best.is_none_or(|(_, d)| dist > d) {
                best = Some((j, dist));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Repeatedly fixes the least fractional integer variable to its nearest
    /// value, trying the other side once on infeasibility.
    fn dive(&mut self, root: &Node, values: &[f64]) -> Result<Option<(Vec<f64>, f64)>, SolveError> {
        let mut node = Node {
            bound: root.bound,
            depth: 0,
            id: 0,
            parent: None,
            bounds: root.bounds.clone(),
        };
        let mut values = values.to_vec();
        for _ in 0..=self.integers.len() {
            let mut pick: Option<(usize, f64)> = None;
            for &j in &self.integers {
                let f = values[j] - values[j].floor();
                let dist = f.min(1.0 - f);
                if dist > INTEGRALITY_TOL && pick.is_none_or(|(_, d)| dist < d) {
                    pick = Some((j, dist));
                }
            }
            let Some((j, _)) = pick else {
                let obj = self.sign
                    * self
                        .problem
                        .objective()
                        .iter()
                        .zip(&values)
                        .map(|(c, x)| c * x)
                        .sum::<f64>();
                return Ok(Some((values, obj)));
            };
            let near = values[j].round();
            let far = if near > values[j] { near - 1.0 } else { near + 1.0 };
            let mut moved = false;
            for target in [near, far] {
                let var = &self.problem.variables()[j];
                if target < var.lower || target > var.upper {
                    continue;
                }
                let trial = node.child(j, target, target, node.bound, 0, None);
                if let Evaluated::Solved { values: v, .. } = self.evaluate(&trial)? {
                    node = trial;
                    values = v;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Ok(None);
            }
        }
        Ok(None)
    }
}

/// Solves `p` to the relative gap in `opts`, exploring best-bound-first and
/// branching on the most fractional integer variable.
pub fn branch_and_bound(p: &MilpProblem, opts: &BranchOptions) -> Result<MilpSolution, SolveError> {
    if !(opts.gap >= 0.0) {
        return Err(SolveError::Malformed(format!(
            "gap must be non-negative, got {}",
            opts.gap
        )));
    }
    let start = Instant::now();
    let sign = p.sense().sign();
    let mut search = Search {
        problem: p,
        sign,
        integers: p.integer_vars().map(|v| v.0).collect(),
        warm: None,
        warm_for: None,
        cache: HashMap::new(),
        cache_order: VecDeque::new(),
        lp_count: 0,
    };
    let original = |internal: f64| sign * internal + p.offset();

    let mut heap = BinaryHeap::new();
    let mut next_id = 1u64;
    heap.push(Node {
        bound: f64::INFINITY,
        depth: 0,
        id: 0,
        parent: None,
        bounds: Vec::new(),
    });
    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut node_count = 0u64;
    let mut exhausted = false;
    let mut dived = !opts.root_dive;

    while let Some(top) = heap.peek() {
        if let Some((_, inc)) = &incumbent {
            if top.bound.is_finite() && relative_gap(original(top.bound), original(*inc)) <= opts.gap {
                break;
            }
        }
        if node_count >= opts.node_budget || opts.time_limit.is_some_and(|t| start.elapsed() >= t) {
            exhausted = true;
            break;
        }
        let node = heap.pop().expect("peeked");
        if let Some((_, inc)) = &incumbent {
            if node.bound <= *inc + 1e-9 * inc.abs().max(1.0) {
                continue;
            }
        }
        node_count += 1;
        if node_count % 1000 == 0 {
            debug!(
                "node {node_count}: bound {} incumbent {:?} open {}",
                original(node.bound),
                incumbent.as_ref().map(|(_, v)| original(*v)),
                heap.len()
            );
        }
        let (values, objective) = match search.evaluate(&node)? {
            Evaluated::Infeasible => continue,
            Evaluated::Solved { values, objective } => (values, objective),
        };
        if let Some((_, inc)) = &incumbent {
            if objective <= *inc + 1e-9 * inc.abs().max(1.0) {
                continue;
            }
        }
        match search.branching_var(&values) {
            None => {
                debug!("incumbent {} at node {node_count}", original(objective));
                incumbent = Some((values, objective));
            }
            Some(j) => {
                search.remember(node.id);
                if !dived || (opts.dive_interval > 0 && node_count % opts.dive_interval == 0) {
                    dived = true;
                    if let Some((v, obj)) = search.dive(&node, &values)? {
                        if incumbent.as_ref().is_none_or(|(_, inc)| obj > *inc) {
                            debug!("dive incumbent {}", original(obj));
                            incumbent = Some((v, obj));
                        }
                    }
                }
                let x = values[j];
                let var = &p.variables()[j];
                let (down, up) = (x.floor(), x.ceil());
                let current = node
                    .bounds
                    .iter()
                    .find(|b| b.0 == j)
                    .map_or((var.lower, var.upper), |b| (b.1, b.2));
                if down >= current.0 {
                    heap.push(node.child(j, current.0, down, objective, next_id, Some(node.id)));
                    next_id += 1;
                }
                if up <= current.1 {
                    heap.push(node.child(j, up, current.1, objective, next_id, Some(node.id)));
                    next_id += 1;
                }
            }
        }
    }

    let open_bound = heap.peek().map(|n| n.bound).filter(|b| b.is_finite());
    let (status, assignment, objective_value, best_bound) = match incumbent {
        Some((values, inc)) => {
            let bound = open_bound.map_or(inc, |b| b.max(inc));
            let status = if exhausted && relative_gap(original(bound), original(inc)) > opts.gap {
                MilpStatus::BudgetExhausted
            } else {
                MilpStatus::OptimalWithinGap
            };
            (status, Some(values), Some(original(inc)), Some(original(bound)))
        }
        None if exhausted => (MilpStatus::BudgetExhausted, None, None, open_bound.map(original)),
        None => (MilpStatus::Infeasible, None, None, None),
    };
    let gap = match (objective_value, best_bound) {
        (Some(o), Some(b)) => relative_gap(b, o),
        _ => f64::INFINITY,
    };
    Ok(MilpSolution {
        status,
        assignment,
        objective_value,
        best_bound,
        gap,
        node_count,
        lp_count: search.lp_count,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
