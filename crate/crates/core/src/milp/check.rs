use super::bnb::INTEGRALITY_TOL;
use super::problem::MilpProblem;
use crate::error::SolveError;

pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Constraint name, or `bound:<var>` / `integer:<var>`.
    pub name: String,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub feasible: bool,
    /// Largest violation over every row, bound and integrality mark, even
    /// when below tolerance.
    pub worst_violation: f64,
    /// Violations above tolerance, largest first.
    pub violations: Vec<Violation>,
}

/// Evaluates every row, bound and integrality requirement of `p` at
/// `assignment` (indexed like the problem's variables).
pub fn check_solution(p: &MilpProblem, assignment: &[f64]) -> Result<CheckReport, SolveError> {
    if let Some(var) = p
        .variables()
        .iter()
        .enumerate()
        .find(|(j, _)| assignment.get(*j).is_none_or(|v| v.is_nan()))
        .map(|(_, v)| v)
    {
        return Err(SolveError::MissingValue(var.name.clone()));
    }
    let mut worst = 0.0_f64;
    let mut violations = Vec::new();
    let mut record = |name: &dyn Fn() -> String, amount: f64| {
        worst = worst.max(amount);
        if amount > FEASIBILITY_TOL {
            violations.push(Violation { name: name(), amount });
        }
    };
    for (var, &x) in p.variables().iter().zip(assignment) {
        let out = (var.lower - x).max(x - var.upper).max(0.0);
        record(&|| format!("bound:{}", var.name), out);
        if var.integer {
            let frac = (x - x.round()).abs();
            if frac > INTEGRALITY_TOL {
                record(&|| format!("integer:{}", var.name), frac);
            }
        }
    }
    for row in p.constraints() {
        record(&|| row.name.clone(), row.violation(assignment));
    }
    violations.sort_by(|a, b| b.amount.total_cmp(&a.amount).then_with(|| a.name.cmp(&b.name)));
    Ok(CheckReport {
        feasible: violations.is_empty(),
        worst_violation: worst,
        violations,
    })
}
