//! Trigger, filter, perform and assign policies.
//!
//! Marginals are utilities, so the entropy- and probability-based policies
//! first map them through a temperature-1 softmax.

use crate::decimation::policy::{EntropyOrder, FrequencySpec};
use crate::engine::{argmax, EngineState};
use crate::graph::FactorGraph;
use crate::rng::RngStream;

/// Softmax of a marginal, max-subtracted. An all-(−∞) marginal maps to the
/// uniform distribution.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return vec![1.0 / z.len() as f64; z.len()];
    }
    let e: Vec<f64> = z.iter().map(|&x| (x - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Shannon entropy (nats) of the softmax of `z`, with `0 ln 0 = 0`.
pub fn entropy_of_marginal(z: &[f64]) -> f64 {
    -softmax(z)
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

fn marginal(state: &EngineState, var: usize) -> Vec<f64> {
    state.marginal(var).expect("candidates are never decimated")
}

/// Quiescence since the last decimation, or `fallback` iterations without it.
pub fn trigger_converge(state: &EngineState, eps: Option<f64>, fallback: u64) -> bool {
    let since = state.t() - state.last_decimation_t();
    let quiet = match eps {
        None => state.last_changed() == 0,
        Some(e) => state.max_change() < e,
    };
    since >= 1 && (quiet || since >= fallback)
}

/// `limit` iterations since the last decimation.
pub fn trigger_time(state: &EngineState, limit: u64) -> bool {
    state.t() - state.last_decimation_t() >= limit
}

/// Current period of a frequency trigger. The decreasing schedule is capped
/// at `cap` so a run stays bounded.
pub fn frequency_period(state: &EngineState, spec: FrequencySpec, cap: u64) -> u64 {
    match spec {
        FrequencySpec::Rate(r) => r.max(1),
        FrequencySpec::Budget(b) => (b / state.num_variables().max(1) as u64).max(1),
        FrequencySpec::Decreasing => (2 * state.last_decimation_t().max(1)).min(cap.max(1)),
    }
}

/// Fires when `t mod f = 0`.
pub fn trigger_frequency(state: &EngineState, spec: FrequencySpec, cap: u64) -> bool {
    state.t() >= 1 && state.t().is_multiple_of(frequency_period(state, spec, cap))
}

/// Every non-decimated variable.
pub fn filter_all(state: &EngineState) -> Vec<usize> {
    state.free_variables()
}

/// Non-decimated variables sharing a factor (in the original graph) with a
/// decimated one. Falls back to [`filter_all`] when that set is empty.
pub fn filter_neighbors(state: &EngineState, fg: &FactorGraph) -> Vec<usize> {
    let near: Vec<usize> = state
        .free_variables()
        .into_iter()
        .filter(|&x| {
            fg.variable_neighbors(x)
                .iter()
                .any(|&y| state.is_decimated(y))
        })
        .collect();
    if near.is_empty() {
        filter_all(state)
    } else {
        near
    }
}

/// One uniform draw per candidate (in the given order); the largest wins,
/// ties to the earliest.
pub fn perform_max_rand(candidates: &[usize], rng: &mut RngStream) -> Vec<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &x in candidates {
        let r = rng.uniform();
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((x, r));
        }
    }
    best.map(|(x, _)| vec![x]).unwrap_or_default()
}

/// Candidate whose score is strictly best under `better`, ties to the first.
fn pick_best(
    candidates: &[usize],
    score: impl Fn(usize) -> f64,
    better: impl Fn(f64, f64) -> bool,
) -> Vec<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &x in candidates {
        let s = score(x);
        if best.is_none_or(|(_, b)| better(s, b)) {
            best = Some((x, s));
        }
    }
    best.map(|(x, _)| vec![x]).unwrap_or_default()
}

pub fn perform_max_entropy(
    candidates: &[usize],
    state: &EngineState,
    order: EntropyOrder,
) -> Vec<usize> {
    let h = |x| entropy_of_marginal(&marginal(state, x));
    match order {
        EntropyOrder::Max => pick_best(candidates, h, |a, b| a > b),
        EntropyOrder::Min => pick_best(candidates, h, |a, b| a < b),
    }
}

/// Candidate with the largest softmax probability mass on a single value.
pub fn perform_max_marginal(candidates: &[usize], state: &EngineState) -> Vec<usize> {
    pick_best(
        candidates,
        |x| softmax(&marginal(state, x)).into_iter().fold(0.0, f64::max),
        |a, b| a > b,
    )
}

/// Every candidate whose marginal entropy exceeds `threshold`; when none
/// does, the single [`perform_max_entropy`] pick.
pub fn perform_threshold_entropy(
    candidates: &[usize],
    state: &EngineState,
    threshold: f64,
    order: EntropyOrder,
) -> Vec<usize> {
    let picked: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&x| entropy_of_marginal(&marginal(state, x)) > threshold)
        .collect();
    if picked.is_empty() {
        perform_max_entropy(candidates, state, order)
    } else {
        picked
    }
}

/// Argmax of the raw marginal, ties to the lowest value.
pub fn assign_max_marginal(var: usize, state: &EngineState) -> usize {
    argmax(&marginal(state, var))
}

/// A value drawn from the softmax of the marginal.
pub fn assign_sample_marginal(var: usize, state: &EngineState, rng: &mut RngStream) -> usize {
    rng.categorical(&softmax(&marginal(state, var)))
}
