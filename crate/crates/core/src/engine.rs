//! Synchronous Max-Sum message passing.
//!
//! One [`EngineState::step`] is a full flooding round: every active variable
//! sends `q_{i→m}(d) = Σ_{m'≠m} r_{m'→i}(d)` computed from the previous
//! round's factor messages, then every active factor sends
//! `r_{m→i}(d) = max_{x_{-i}} [u_m(x) + Σ_{j≠i} q_{j→m}(x_j)]` computed from
//! the fresh variable messages. Payloads are normalized after computation.
//!
//! The state also owns the working (sliced) factor tables, so decimation can
//! fix variables in place while keeping the remaining messages.

use serde::Serialize;

use crate::dcop::{slice_factor, Assignment, Dcop, Factor};
use crate::error::{Error, Result};

pub const DEFAULT_EPS: f64 = 1e-6;
pub const DEFAULT_LIMIT: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Subtract the mean of the finite entries.
    #[default]
    Mean,
    /// Subtract the maximum entry.
    Max,
    None,
}

impl Normalization {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Some(Normalization::Mean),
            "max" => Some(Normalization::Max),
            "none" => Some(Normalization::None),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    /// Max-norm change below which a message counts as unchanged.
    pub eps: f64,
    /// Iteration limit (LIMIT).
    pub limit: u64,
    pub normalization: Normalization,
    /// Do not send (or count) messages that did not change.
    pub suppression: bool,
    /// Record a [`TraceRecord`] per iteration.
    pub trace: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            eps: DEFAULT_EPS,
            limit: DEFAULT_LIMIT,
            normalization: Normalization::Mean,
            suppression: true,
            trace: false,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Parameter(format!(
                "eps must be > 0, got {}",
                self.eps
            )));
        }
        if self.limit < 1 {
            return Err(Error::Parameter("limit must be >= 1".into()));
        }
        Ok(())
    }
}

/// Which way a message travels along a variable/factor edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    ToFactor,
    ToVariable,
}

/// A directed edge between variable `var` and factor `factor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub var: usize,
    pub factor: usize,
    pub direction: Direction,
}

/// Per-iteration diagnostics, emitted as JSON lines when tracing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: u64,
    pub msgs_sent: u64,
    pub max_change: f64,
    /// `(variable, value)` pairs fixed at this iteration.
    pub decimations: Vec<(usize, usize)>,
}

/// A factor's working table plus the messages on its edges.
#[derive(Debug, Clone)]
struct Slot {
    scope: Vec<usize>,
    sizes: Vec<usize>,
    table: Vec<f64>,
    /// q: variable → factor, per scope position.
    to_factor: Vec<Vec<f64>>,
    /// r: factor → variable, per scope position.
    to_var: Vec<Vec<f64>>,
    /// Value attached by each sender under value propagation.
    attached: Vec<Option<usize>>,
}

impl Slot {
    fn position(&self, var: usize) -> Option<usize> {
        self.scope.iter().position(|&v| v == var)
    }
}

#[derive(Debug, Clone)]
pub struct EngineState {
    t: u64,
    domain_sizes: Vec<usize>,
    slots: Vec<Slot>,
    /// Active factors adjacent to each variable.
    var_factors: Vec<Vec<usize>>,
    fixed: Vec<Option<usize>>,
    msgs_sent: u64,
    last_sent: u64,
    last_changed: u64,
    max_change: f64,
    last_decimation_t: u64,
    decimations: usize,
    trace: Option<Vec<TraceRecord>>,
}

fn diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

fn max_norm_change(old: &[f64], new: &[f64]) -> f64 {
    old.iter()
        .zip(new)
        .map(|(&a, &b)| diff(a, b))
        .fold(0.0, f64::max)
}

/// Normalizes a payload in place. Entries at −∞ stay there; a payload with no
/// finite entry becomes all zeros.
pub fn normalize(payload: &mut [f64], mode: Normalization) {
    let finite = payload.iter().filter(|x| x.is_finite());
    let shift = match mode {
        Normalization::None => return,
        Normalization::Mean => {
            let (sum, n) = finite.fold((0.0, 0usize), |(s, n), &x| (s + x, n + 1));
            if n == 0 {
                payload.iter_mut().for_each(|x| *x = 0.0);
                return;
            }
            sum / n as f64
        }
        Normalization::Max => match finite.copied().reduce(f64::max) {
            Some(m) => m,
            None => {
                payload.iter_mut().for_each(|x| *x = 0.0);
                return;
            }
        },
    };
    payload.iter_mut().for_each(|x| *x -= shift);
}

/// Unnormalized factor-to-variable message for scope position `target`.
///
/// `incoming[k]` is the message from scope position `k` (ignored for
/// `target`); `restrict[k] = Some(v)` pins position `k` to value `v`.
pub fn factor_to_variable(
    table: &[f64],
    sizes: &[usize],
    target: usize,
    incoming: &[Vec<f64>],
    restrict: &[Option<usize>],
) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; sizes[target]];
    let mut vals = vec![0usize; sizes.len()];
    for &u in table {
        let allowed = vals
            .iter()
            .zip(restrict)
            .enumerate()
            .all(|(k, (&v, r))| k == target || r.is_none_or(|p| p == v));
        if allowed {
            let s = u + vals
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != target)
                .map(|(k, &v)| incoming[k][v])
                .sum::<f64>();
            let o = &mut out[vals[target]];
            if s > *o {
                *o = s;
            }
        }
        for k in (0..sizes.len()).rev() {
            vals[k] += 1;
            if vals[k] < sizes[k] {
                break;
            }
            vals[k] = 0;
        }
    }
    out
}

/// Index of the largest entry, ties to the lowest index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

impl EngineState {
    /// Fresh state: all messages zero, nothing decimated, `t = 0`.
    pub fn new(dcop: &Dcop) -> Self {
        let domain_sizes = dcop.domain_sizes();
        let mut var_factors = vec![Vec::new(); domain_sizes.len()];
        let slots = dcop
            .factors
            .iter()
            .enumerate()
            .map(|(m, f)| {
                for &v in &f.scope {
                    var_factors[v].push(m);
                }
                let sizes: Vec<usize> = f.scope.iter().map(|&v| domain_sizes[v]).collect();
                Slot {
                    to_factor: sizes.iter().map(|&n| vec![0.0; n]).collect(),
                    to_var: sizes.iter().map(|&n| vec![0.0; n]).collect(),
                    attached: vec![None; sizes.len()],
                    scope: f.scope.clone(),
                    sizes,
                    table: f.table.clone(),
                }
            })
            .collect();
        EngineState {
            t: 0,
            fixed: vec![None; domain_sizes.len()],
            domain_sizes,
            slots,
            var_factors,
            msgs_sent: 0,
            last_sent: 0,
            last_changed: 0,
            max_change: 0.0,
            last_decimation_t: 0,
            decimations: 0,
            trace: None,
        }
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on.then(Vec::new);
        self
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn msgs_sent(&self) -> u64 {
        self.msgs_sent
    }

    /// Messages propagated by the most recent step.
    pub fn last_sent(&self) -> u64 {
        self.last_sent
    }

    /// Messages whose payload changed by at least eps in the most recent step.
    pub fn last_changed(&self) -> u64 {
        self.last_changed
    }

    pub fn max_change(&self) -> f64 {
        self.max_change
    }

    pub fn last_decimation_t(&self) -> u64 {
        self.last_decimation_t
    }

    pub fn decimations(&self) -> usize {
        self.decimations
    }

    pub fn num_variables(&self) -> usize {
        self.domain_sizes.len()
    }

    pub fn domain_size(&self, var: usize) -> usize {
        self.domain_sizes[var]
    }

    pub fn is_decimated(&self, var: usize) -> bool {
        self.fixed[var].is_some()
    }

    pub fn fixed_value(&self, var: usize) -> Option<usize> {
        self.fixed[var]
    }

    pub fn all_decimated(&self) -> bool {
        self.fixed.iter().all(Option::is_some)
    }

    /// Non-decimated variables, ascending.
    pub fn free_variables(&self) -> Vec<usize> {
        (0..self.num_variables())
            .filter(|&v| self.fixed[v].is_none())
            .collect()
    }

    /// Directed edges currently carrying messages (twice the active edge count).
    pub fn num_directed_edges(&self) -> usize {
        2 * self.slots.iter().map(|s| s.scope.len()).sum::<usize>()
    }

    /// Current scope of factor `m` after slicing.
    pub fn factor_scope(&self, m: usize) -> &[usize] {
        &self.slots[m].scope
    }

    /// Active factors adjacent to `var`.
    pub fn variable_factors(&self, var: usize) -> &[usize] {
        &self.var_factors[var]
    }

    /// Current payload on the factor→variable edge, if that edge is active.
    pub fn factor_message(&self, m: usize, var: usize) -> Option<&[f64]> {
        let s = &self.slots[m];
        s.position(var).map(|k| s.to_var[k].as_slice())
    }

    /// Current payload on the variable→factor edge, if that edge is active.
    pub fn variable_message(&self, var: usize, m: usize) -> Option<&[f64]> {
        let s = &self.slots[m];
        s.position(var).map(|k| s.to_factor[k].as_slice())
    }

    pub fn trace(&self) -> &[TraceRecord] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn take_trace(&mut self) -> Vec<TraceRecord> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    /// Sum of incoming factor messages at `var`, excluding factor `skip`.
    fn incoming_sum(&self, var: usize, skip: Option<usize>) -> Vec<f64> {
        let mut acc = vec![0.0; self.domain_sizes[var]];
        for &m in &self.var_factors[var] {
            if Some(m) == skip {
                continue;
            }
            let s = &self.slots[m];
            let k = s.position(var).expect("adjacency out of sync");
            acc.iter_mut().zip(&s.to_var[k]).for_each(|(a, r)| *a += r);
        }
        acc
    }

    /// Variable-to-factor message `q_{var→m}` computed from the current
    /// factor messages, normalized.
    pub fn compute_variable_message(&self, var: usize, m: usize, mode: Normalization) -> Vec<f64> {
        let mut q = self.incoming_sum(var, Some(m));
        normalize(&mut q, mode);
        q
    }

    /// Factor-to-variable message `r_{m→var}` computed from the current
    /// variable messages, normalized.
    pub fn compute_factor_message(
        &self,
        m: usize,
        var: usize,
        mode: Normalization,
    ) -> Result<Vec<f64>> {
        let s = &self.slots[m];
        let k = s.position(var).ok_or(Error::NotInScope(var))?;
        let mut r = factor_to_variable(&s.table, &s.sizes, k, &s.to_factor, &s.attached);
        normalize(&mut r, mode);
        Ok(r)
    }

    /// Marginal `z_i(d) = Σ_m r_{m→i}(d)`.
    pub fn marginal(&self, var: usize) -> Result<Vec<f64>> {
        if self.is_decimated(var) {
            return Err(Error::AlreadyDecimated(var));
        }
        Ok(self.incoming_sum(var, None))
    }

    /// Quiescence: the last round changed no message by eps or more.
    pub fn has_converged(&self) -> bool {
        self.t >= 1 && self.last_changed == 0
    }

    /// Fixed values for decimated variables, argmax of the marginal otherwise.
    pub fn decode(&self) -> Assignment {
        let values = (0..self.num_variables())
            .map(|v| {
                Some(match self.fixed[v] {
                    Some(d) => d,
                    None => argmax(&self.incoming_sum(v, None)),
                })
            })
            .collect();
        Assignment { values }
    }

    /// One synchronous flooding round.
    pub fn step(&mut self, cfg: &EngineConfig) {
        self.step_scheduled(cfg, |_| true, false);
    }

    /// One synchronous round restricted to the edges `allow` accepts.
    ///
    /// With `value_propagation`, each variable attaches the argmax of its
    /// current marginal to every message it sends, and factors maximize only
    /// over the attached value of such senders.
    pub fn step_scheduled<F>(&mut self, cfg: &EngineConfig, allow: F, value_propagation: bool)
    where
        F: Fn(Edge) -> bool,
    {
        let mut changed = 0u64;
        let mut sent = 0u64;
        let mut max_change = 0.0f64;
        let mut tally = |delta: f64, value_moved: bool| {
            let moved = delta >= cfg.eps || value_moved;
            max_change = max_change.max(delta);
            changed += moved as u64;
            sent += (moved || !cfg.suppression) as u64;
        };

        // variable → factor, from last round's factor messages
        let marginals: Vec<Option<usize>> = if value_propagation {
            (0..self.num_variables())
                .map(|v| (!self.is_decimated(v)).then(|| argmax(&self.incoming_sum(v, None))))
                .collect()
        } else {
            Vec::new()
        };
        let mut fresh_q = Vec::new();
        for (m, s) in self.slots.iter().enumerate() {
            for (k, &var) in s.scope.iter().enumerate() {
                let e = Edge {
                    var,
                    factor: m,
                    direction: Direction::ToFactor,
                };
                if allow(e) {
                    let q = self.compute_variable_message(var, m, cfg.normalization);
                    let value = if value_propagation {
                        marginals[var]
                    } else {
                        None
                    };
                    fresh_q.push((m, k, q, value));
                }
            }
        }
        for (m, k, q, value) in fresh_q {
            let s = &mut self.slots[m];
            tally(max_norm_change(&s.to_factor[k], &q), s.attached[k] != value);
            s.to_factor[k] = q;
            s.attached[k] = value;
        }

        // factor → variable, from the fresh variable messages
        for (m, s) in self.slots.iter_mut().enumerate() {
            for k in 0..s.scope.len() {
                let e = Edge {
                    var: s.scope[k],
                    factor: m,
                    direction: Direction::ToVariable,
                };
                if allow(e) {
                    let mut r =
                        factor_to_variable(&s.table, &s.sizes, k, &s.to_factor, &s.attached);
                    normalize(&mut r, cfg.normalization);
                    tally(max_norm_change(&s.to_var[k], &r), false);
                    s.to_var[k] = r;
                }
            }
        }

        self.t += 1;
        self.msgs_sent += sent;
        self.last_sent = sent;
        self.last_changed = changed;
        self.max_change = max_change;
        if let Some(trace) = &mut self.trace {
            trace.push(TraceRecord {
                t: self.t,
                msgs_sent: sent,
                max_change,
                decimations: Vec::new(),
            });
        }
    }

    /// Fixes `var = value`: slices every adjacent factor, drops the edges and
    /// messages touching `var`. Factors sliced to an empty scope stay as
    /// scalars.
    pub fn decimate(&mut self, var: usize, value: usize) -> Result<()> {
        if self.is_decimated(var) {
            return Err(Error::AlreadyDecimated(var));
        }
        if value >= self.domain_sizes[var] {
            return Err(Error::ValueOutOfRange {
                variable: var.to_string(),
                value,
            });
        }
        for m in std::mem::take(&mut self.var_factors[var]) {
            let s = &mut self.slots[m];
            let k = s.position(var).expect("adjacency out of sync");
            let f = Factor {
                id: String::new(),
                scope: std::mem::take(&mut s.scope),
                table: std::mem::take(&mut s.table),
            };
            let sliced = slice_factor(&f, &s.sizes, var, value)?;
            s.scope = sliced.scope;
            s.table = sliced.table;
            s.sizes.remove(k);
            s.to_factor.remove(k);
            s.to_var.remove(k);
            s.attached.remove(k);
        }
        self.fixed[var] = Some(value);
        self.decimations += 1;
        self.last_decimation_t = self.t;
        let t = self.t;
        if let Some(trace) = &mut self.trace {
            match trace.last_mut() {
                Some(rec) if rec.t == t => rec.decimations.push((var, value)),
                _ => trace.push(TraceRecord {
                    t,
                    msgs_sent: 0,
                    max_change: 0.0,
                    decimations: vec![(var, value)],
                }),
            }
        }
        Ok(())
    }

    /// Utility of the current sliced graph under `values` (indexed by
    /// variable; entries of decimated variables are ignored). Includes the
    /// scalar contributions of fully sliced factors.
    pub fn residual_utility(&self, values: &[usize]) -> f64 {
        self.slots
            .iter()
            .map(|s| {
                let idx = s
                    .scope
                    .iter()
                    .zip(&s.sizes)
                    .fold(0, |acc, (&v, &n)| acc * n + values[v]);
                s.table[idx]
            })
            .sum()
    }

    /// Sum of the factors that have been sliced down to scalars.
    pub fn scalar_utility(&self) -> f64 {
        self.slots
            .iter()
            .filter(|s| s.scope.is_empty())
            .map(|s| s.table[0])
            .sum()
    }
}
