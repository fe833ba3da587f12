//! Problem model: variables with finite domains, factors with dense utility
//! tables, and the agent mapping.
//!
//! Tables are always stored as utilities to be maximized. Problems written in
//! the cost sense are negated on load and negated back on save, so one engine
//! code path serves both.

use std::collections::HashSet;

use crate::error::{Error, Result, Violation};

/// Default cap on the number of assignments [`brute_force_optimum`] enumerates.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sense {
    #[default]
    MaximizeUtility,
    MinimizeCost,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::MaximizeUtility => "maximize-utility",
            Sense::MinimizeCost => "minimize-cost",
        }
    }

    pub fn parse(s: &str) -> Option<Sense> {
        match s {
            "maximize-utility" | "maximize" | "utility" => Some(Sense::MaximizeUtility),
            "minimize-cost" | "minimize" | "cost" => Some(Sense::MinimizeCost),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub id: String,
    /// Ordered value labels; values are referred to by their index.
    pub domain: Vec<String>,
}

impl Variable {
    pub fn new(id: impl Into<String>, domain_size: usize) -> Self {
        Variable {
            id: id.into(),
            domain: (0..domain_size).map(|d| d.to_string()).collect(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }
}

/// A soft constraint over an ordered scope of variable indices.
///
/// `table` is row-major over the scope: the last scope variable varies
/// fastest. An empty scope is a scalar factor holding a single entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub id: String,
    pub scope: Vec<usize>,
    pub table: Vec<f64>,
}

impl Factor {
    pub fn new(id: impl Into<String>, scope: Vec<usize>, table: Vec<f64>) -> Self {
        Factor {
            id: id.into(),
            scope,
            table,
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.scope.is_empty()
    }

    /// Row-major strides for the given per-scope domain sizes.
    pub fn strides(sizes: &[usize]) -> Vec<usize> {
        let mut strides = vec![1; sizes.len()];
        for k in (0..sizes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * sizes[k + 1];
        }
        strides
    }

    /// Table index of the given per-scope values.
    pub fn index_of(values: &[usize], sizes: &[usize]) -> usize {
        values
            .iter()
            .zip(sizes)
            .fold(0, |acc, (&v, &n)| acc * n + v)
    }
}

/// A (possibly partial) assignment of domain indices to variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    pub values: Vec<Option<usize>>,
}

impl Assignment {
    pub fn empty(num_variables: usize) -> Self {
        Assignment {
            values: vec![None; num_variables],
        }
    }

    pub fn total(values: Vec<usize>) -> Self {
        Assignment {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        self.values.get(var).copied().flatten()
    }

    pub fn set(&mut self, var: usize, value: usize) {
        self.values[var] = Some(value);
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// The assigned values, if the assignment is total.
    pub fn to_values(&self) -> Option<Vec<usize>> {
        self.values.iter().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dcop {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub factors: Vec<Factor>,
    /// Agent owning each variable, indexed like `variables`.
    pub agents: Vec<String>,
}

impl Dcop {
    /// A utility-sense problem with one agent per variable.
    pub fn new(variables: Vec<Variable>, factors: Vec<Factor>) -> Self {
        let agents = variables.iter().map(|v| format!("a_{}", v.id)).collect();
        Dcop {
            sense: Sense::MaximizeUtility,
            variables,
            factors,
            agents,
        }
    }

    /// Shorthand for tests and generators: variables `x0..` with the given
    /// domain sizes.
    pub fn with_domains(sizes: &[usize], factors: Vec<Factor>) -> Self {
        let vars = sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| Variable::new(format!("x{i}"), n))
            .collect();
        Dcop::new(vars, factors)
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn domain_size(&self, var: usize) -> usize {
        self.variables[var].domain_size()
    }

    pub fn domain_sizes(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::domain_size).collect()
    }

    pub fn scope_sizes(&self, factor: &Factor) -> Vec<usize> {
        factor.scope.iter().map(|&v| self.domain_size(v)).collect()
    }

    pub fn variable_index(&self, id: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.id == id)
    }

    fn var_label(&self, var: usize) -> String {
        self.variables
            .get(var)
            .map(|v| v.id.clone())
            .unwrap_or_else(|| var.to_string())
    }

    /// Checks every structural invariant and reports all violations found.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        let mut seen = HashSet::new();
        for v in &self.variables {
            if v.domain.is_empty() {
                errors.push(Violation::EmptyDomain {
                    variable: v.id.clone(),
                });
            }
            if !seen.insert(v.id.as_str()) {
                errors.push(Violation::DuplicateVariable {
                    variable: v.id.clone(),
                });
            }
        }
        if self.agents.len() != self.variables.len() {
            errors.push(Violation::AgentMapSize {
                expected: self.variables.len(),
                actual: self.agents.len(),
            });
        }
        for (v, agent) in self.variables.iter().zip(&self.agents) {
            if agent.is_empty() {
                errors.push(Violation::MissingAgent {
                    variable: v.id.clone(),
                });
            }
        }
        for f in &self.factors {
            let mut in_scope = HashSet::new();
            let mut scope_ok = true;
            for &var in &f.scope {
                if var >= self.variables.len() {
                    scope_ok = false;
                    errors.push(Violation::UnknownVariable {
                        factor: f.id.clone(),
                        variable: var.to_string(),
                    });
                } else if !in_scope.insert(var) {
                    scope_ok = false;
                    errors.push(Violation::DuplicateScopeVariable {
                        factor: f.id.clone(),
                        variable: self.var_label(var),
                    });
                }
            }
            if scope_ok {
                let expected: usize = f.scope.iter().map(|&v| self.domain_size(v)).product();
                if expected != f.table.len() {
                    errors.push(Violation::TableLengthMismatch {
                        factor: f.id.clone(),
                        expected,
                        actual: f.table.len(),
                    });
                }
            }
            for (index, &value) in f.table.iter().enumerate() {
                // utilities live in R ∪ {-inf}
                if value.is_nan() || value == f64::INFINITY {
                    errors.push(Violation::InvalidEntry {
                        factor: f.id.clone(),
                        index,
                        value,
                    });
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errors))
        }
    }

    /// Utility contributed by one factor under a total assignment.
    pub fn factor_utility(&self, factor: &Factor, values: &[usize]) -> f64 {
        let idx = factor
            .scope
            .iter()
            .fold(0, |acc, &v| acc * self.domain_size(v) + values[v]);
        factor.table[idx]
    }

    /// Sum of all factor utilities under `a`, which must be total.
    pub fn total_utility(&self, a: &Assignment) -> Result<f64> {
        if a.values.len() != self.variables.len() {
            return Err(Error::Parameter(format!(
                "assignment covers {} variables, problem has {}",
                a.values.len(),
                self.variables.len()
            )));
        }
        let mut values = Vec::with_capacity(a.values.len());
        for (i, v) in a.values.iter().enumerate() {
            match *v {
                None => return Err(Error::PartialAssignment(self.var_label(i))),
                Some(d) if d >= self.domain_size(i) => {
                    return Err(Error::ValueOutOfRange {
                        variable: self.var_label(i),
                        value: d,
                    })
                }
                Some(d) => values.push(d),
            }
        }
        Ok(self.utility_of_values(&values))
    }

    /// Like [`Dcop::total_utility`] for a dense value vector, unchecked.
    pub fn utility_of_values(&self, values: &[usize]) -> f64 {
        self.factors
            .iter()
            .map(|f| self.factor_utility(f, values))
            .sum()
    }

    /// Reporting cost of an assignment: the negated utility.
    pub fn cost_of(&self, a: &Assignment) -> Result<f64> {
        self.total_utility(a).map(|u| -u)
    }
}

/// Restricts `factor` to `var = value`, dropping `var` from its scope.
///
/// `sizes` are the domain sizes of the factor's scope, in scope order.
/// Slicing a unary factor yields a scalar factor with a single entry.
pub fn slice_factor(factor: &Factor, sizes: &[usize], var: usize, value: usize) -> Result<Factor> {
    let pos = factor
        .scope
        .iter()
        .position(|&v| v == var)
        .ok_or(Error::NotInScope(var))?;
    if value >= sizes[pos] {
        return Err(Error::ValueOutOfRange {
            variable: var.to_string(),
            value,
        });
    }
    let strides = Factor::strides(sizes);
    let outer: usize = sizes[..pos].iter().product();
    let inner = strides[pos];
    let block = sizes[pos] * inner;
    let mut table = Vec::with_capacity(outer * inner);
    for o in 0..outer {
        let base = o * block + value * inner;
        table.extend_from_slice(&factor.table[base..base + inner]);
    }
    let mut scope = factor.scope.clone();
    scope.remove(pos);
    Ok(Factor {
        id: factor.id.clone(),
        scope,
        table,
    })
}

/// Exhaustive search for the utility-maximizing total assignment.
///
/// Assignments are visited in lexicographic order and only a strictly better
/// one replaces the incumbent, so ties resolve to the lexicographically
/// smallest assignment.
pub fn brute_force_optimum(dcop: &Dcop) -> Result<(Assignment, f64)> {
    brute_force_optimum_capped(dcop, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_optimum_capped(dcop: &Dcop, cap: u128) -> Result<(Assignment, f64)> {
    let (best, best_u, _) = enumerate_extremes(dcop, cap)?;
    Ok((Assignment::total(best), best_u))
}

/// Best and worst total utility over all assignments, with the best
/// assignment. Used by the harness to normalize cost gaps.
pub fn enumerate_extremes(dcop: &Dcop, cap: u128) -> Result<(Vec<usize>, f64, f64)> {
    dcop.validate()?;
    let sizes = dcop.domain_sizes();
    let space: u128 = sizes.iter().map(|&n| n as u128).product();
    if space > cap {
        return Err(Error::EnumerationCap(space, cap));
    }
    let n = sizes.len();
    let mut values = vec![0usize; n];
    let mut best = values.clone();
    let mut best_u = dcop.utility_of_values(&values);
    let mut worst_u = best_u;
    loop {
        // odometer: the last variable varies fastest
        let mut k = n;
        loop {
            if k == 0 {
                return Ok((best, best_u, worst_u));
            }
            k -= 1;
            values[k] += 1;
            if values[k] < sizes[k] {
                break;
            }
            values[k] = 0;
        }
        let u = dcop.utility_of_values(&values);
        if u > best_u {
            best_u = u;
            best.copy_from_slice(&values);
        }
        if u < worst_u {
            worst_u = u;
        }
    }
}
