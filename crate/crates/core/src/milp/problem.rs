use std::collections::HashMap;
use std::fmt;

use crate::error::SolveError;

/// Index of a variable within its [`MilpProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// Factor that turns the objective into a maximization.
    pub(crate) fn sign(self) -> f64 {
        match self {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violate this row (zero when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A mixed-integer linear program in a solver-neutral form.
///
/// Variables and rows are addressed by insertion order; names are unique within
/// each kind. Coefficients repeated for the same variable are summed.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem {
    sense: Sense,
    variables: Vec<Variable>,
    objective: Vec<f64>,
    offset: f64,
    constraints: Vec<Constraint>,
    var_names: HashMap<String, VarId>,
    row_names: HashMap<String, usize>,
}

impl MilpProblem {
    pub fn new(sense: Sense) -> Self {
        MilpProblem {
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            offset: 0.0,
            constraints: Vec::new(),
            var_names: HashMap::new(),
            row_names: HashMap::new(),
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        integer: bool,
    ) -> Result<VarId, SolveError> {
        let name = name.into();
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(SolveError::Malformed(format!(
                "variable `{name}` has invalid bounds [{lower}, {upper}]"
            )));
        }
        if self.var_names.contains_key(&name) {
            return Err(SolveError::Malformed(format!("duplicate variable name `{name}`")));
        }
        let id = VarId(self.variables.len());
        self.var_names.insert(name.clone(), id);
        self.variables.push(Variable {
            name,
            lower,
            upper,
            integer,
        });
        self.objective.push(0.0);
        Ok(id)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VarId, SolveError> {
        self.add_var(name, lower, upper, false)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, SolveError> {
        self.add_var(name, 0.0, 1.0, true)
    }

    pub fn set_objective(&mut self, var: VarId, coeff: f64) -> Result<(), SolveError> {
        self.check_var(var)?;
        if !coeff.is_finite() {
            return Err(SolveError::Malformed(format!(
                "non-finite objective coefficient on `{}`",
                self.variables[var.0].name
            )));
        }
        self.objective[var.0] = coeff;
        Ok(())
    }

    pub fn add_objective(&mut self, var: VarId, coeff: f64) -> Result<(), SolveError> {
        self.check_var(var)?;
        self.set_objective(var, self.objective[var.0] + coeff)
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, SolveError> {
        let name = name.into();
        if self.row_names.contains_key(&name) {
            return Err(SolveError::Malformed(format!("duplicate constraint name `{name}`")));
        }
        if !rhs.is_finite() {
            return Err(SolveError::Malformed(format!("constraint `{name}` has non-finite rhs")));
        }
        let mut merged: Vec<(VarId, f64)> = Vec::new();
        for (v, c) in terms {
            self.check_var(v)?;
            if !c.is_finite() {
                return Err(SolveError::Malformed(format!(
                    "constraint `{name}` has a non-finite coefficient"
                )));
            }
            match merged.iter_mut().find(|(u, _)| *u == v) {
                Some(slot) => slot.1 += c,
                None => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        let idx = self.constraints.len();
        self.row_names.insert(name.clone(), idx);
        self.constraints.push(Constraint {
            name,
            terms: merged,
            relation,
            rhs,
        });
        Ok(idx)
    }

    fn check_var(&self, var: VarId) -> Result<(), SolveError> {
        if var.0 < self.variables.len() {
            Ok(())
        } else {
            Err(SolveError::Malformed(format!("variable index {} not declared", var.0)))
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, var: VarId) -> &Variable {
        &self.variables[var.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied()
    }

    pub fn constraint_by_name(&self, name: &str) -> Option<&Constraint> {
        self.row_names.get(name).map(|i| &self.constraints[*i])
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn integer_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.integer)
            .map(|(i, _)| VarId(i))
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.offset + self.objective.iter().zip(values).map(|(c, x)| c * x).sum::<f64>()
    }

    /// Copy of the problem with the bounds of `var` replaced.
    pub fn with_bounds(&self, var: VarId, lower: f64, upper: f64) -> Self {
        let mut p = self.clone();
        p.variables[var.0].lower = lower;
        p.variables[var.0].upper = upper;
        p
    }

    /// Copy with every integrality mark removed.
    pub fn relaxed(&self) -> Self {
        let mut p = self.clone();
        p.variables.iter_mut().for_each(|v| v.integer = false);
        p
    }
}
