//! LP relaxations: equilibration scaling in front of the `microlp` engine.

use std::collections::BTreeMap;

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use super::problem::{MilpProblem, Relation, VarId};
use crate::error::SolveError;

const SCALING_PASSES: usize = 4;

/// Solution of the LP relaxation, in the problem's own units and sense.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    /// Objective including the constant offset.
    pub objective: f64,
}

/// Solves the continuous relaxation of `p` (integrality marks ignored).
pub fn solve_lp(p: &MilpProblem) -> Result<LpSolution, SolveError> {
    let lp = Relaxation::cold(p, &[])?;
    Ok(LpSolution {
        values: lp.values(),
        objective: p.evaluate(&lp.values()),
    })
}

/// Power-of-two row and column factors. A scaled problem has
/// `A' = R A C`, `b' = R b` and `x = C x'`; integer columns keep factor 1.
#[derive(Debug, Clone)]
pub(crate) struct Scaling {
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
}

impl Scaling {
    pub fn equilibrate(p: &MilpProblem) -> Self {
        let mut rows = vec![1.0; p.num_constraints()];
        let mut cols = vec![1.0; p.num_vars()];
        for _ in 0..SCALING_PASSES {
            for (i, c) in p.constraints().iter().enumerate() {
                if let Some(f) = geometric_factor(c.terms.iter().map(|(v, a)| a * cols[v.0])) {
                    rows[i] = f;
                }
            }
            let mut lo = vec![f64::INFINITY; p.num_vars()];
            let mut hi = vec![0.0_f64; p.num_vars()];
            for (i, c) in p.constraints().iter().enumerate() {
                for (v, a) in &c.terms {
                    let m = (a * rows[i]).abs();
                    lo[v.0] = lo[v.0].min(m);
                    hi[v.0] = hi[v.0].max(m);
                }
            }
            for (j, var) in p.variables().iter().enumerate() {
                if !var.integer && hi[j] > 0.0 {
                    cols[j] = pow2(1.0 / (lo[j] * hi[j]).sqrt());
                }
            }
        }
        Scaling { rows, cols }
    }
}

fn geometric_factor(coeffs: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for a in coeffs {
        let m = a.abs();
        if m > 0.0 {
            lo = lo.min(m);
            hi = hi.max(m);
        }
    }
    (hi > 0.0).then(|| pow2(1.0 / (lo * hi).sqrt()))
}

fn pow2(x: f64) -> f64 {
    2f64.powi(x.log2().round().clamp(-60.0, 60.0) as i32)
}

fn map_err(e: microlp::Error) -> SolveError {
    match e {
        microlp::Error::Infeasible => SolveError::Infeasible,
        microlp::Error::Unbounded => SolveError::Unbounded,
        other => SolveError::Numerical(other.to_string()),
    }
}

fn into_solution(outcome: microlp::SolveOutcome) -> Result<microlp::Solution, SolveError> {
    outcome
        .into_solution()
        .map_err(|_| SolveError::Numerical("LP solve interrupted".into()))
}

/// A solved relaxation that can be re-solved after fixing or releasing
/// individual variables. The engine always maximizes; minimization problems
/// are negated on the way in.
#[derive(Clone)]
pub(crate) struct Relaxation {
    solution: microlp::Solution,
    vars: Vec<microlp::Variable>,
    col_scale: Vec<f64>,
    fixes: BTreeMap<usize, f64>,
}

impl Relaxation {
    /// Solves from scratch with the given `(var, lower, upper)` overrides.
    pub fn cold(p: &MilpProblem, overrides: &[(usize, f64, f64)]) -> Result<Self, SolveError> {
        let scaling = Scaling::equilibrate(p);
        let sign = p.sense().sign();
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let mut bounds: Vec<(f64, f64)> = p.variables().iter().map(|v| (v.lower, v.upper)).collect();
        for &(j, lo, hi) in overrides {
            bounds[j] = (lo, hi);
        }
        if bounds.iter().any(|(lo, hi)| lo > hi) {
            return Err(SolveError::Infeasible);
        }
        let vars: Vec<microlp::Variable> = bounds
            .iter()
            .enumerate()
            .map(|(j, (lo, hi))| {
                let c = scaling.cols[j];
                lp.add_var(sign * p.objective()[j] * c, (lo / c, hi / c))
            })
            .collect();
        for (i, row) in p.constraints().iter().enumerate() {
            let r = scaling.rows[i];
            if row.terms.is_empty() {
                if row.violation(&[]) > 0.0 {
                    return Err(SolveError::Infeasible);
                }
                continue;
            }
            let expr: Vec<(microlp::Variable, f64)> = row
                .terms
                .iter()
                .map(|(v, a)| (vars[v.0], a * r * scaling.cols[v.0]))
                .collect();
            let op = match row.relation {
                Relation::Le => ComparisonOp::Le,
                Relation::Ge => ComparisonOp::Ge,
                Relation::Eq => ComparisonOp::Eq,
            };
            lp.add_constraint(expr.as_slice(), op, row.rhs * r);
        }
        let solution = into_solution(lp.solve().map_err(map_err)?)?;
        Ok(Relaxation {
            solution,
            vars,
            col_scale: scaling.cols,
            fixes: BTreeMap::new(),
        })
    }

    pub fn values(&self) -> Vec<f64> {
        self.vars
            .iter()
            .zip(&self.col_scale)
            .map(|(v, c)| self.solution.var_value_raw(*v) * c)
            .collect()
    }

    /// Objective in maximization form, without the constant offset.
    pub fn internal_objective(&self) -> f64 {
        self.solution.objective()
    }

    pub fn fixes(&self) -> &BTreeMap<usize, f64> {
        &self.fixes
    }

    /// Fixes an unscaled-integer column. Consumes the relaxation because the
    /// engine does; clone first to keep the parent.
    pub fn fix(self, var: VarId, value: f64) -> Result<Self, SolveError> {
        let Relaxation {
            solution,
            vars,
            col_scale,
            mut fixes,
        } = self;
        let scaled = value / col_scale[var.0];
        let solution = into_solution(solution.fix_var(vars[var.0], scaled).map_err(map_err)?)?;
        fixes.insert(var.0, value);
        Ok(Relaxation {
            solution,
            vars,
            col_scale,
            fixes,
        })
    }

    pub fn unfix(self, var: VarId) -> Result<Self, SolveError> {
        let Relaxation {
            solution,
            vars,
            col_scale,
            mut fixes,
        } = self;
        let (outcome, _) = solution.unfix_var(vars[var.0]).map_err(map_err)?;
        fixes.remove(&var.0);
        Ok(Relaxation {
            solution: into_solution(outcome)?,
            vars,
            col_scale,
            fixes,
        })
    }
}
