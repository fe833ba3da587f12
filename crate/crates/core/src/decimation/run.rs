use crate::dcop::Dcop;
use crate::decimation::policy::{Assign, DecimationPolicy, Filter, Perform, Trigger};
use crate::decimation::select::*;
use crate::engine::{EngineConfig, EngineState};
use crate::error::Result;
use crate::graph::FactorGraph;
use crate::outcome::RunOutcome;
use crate::rng::RngStream;

/// Fixes `var = value` in the engine state, slicing the factors around it.
pub fn apply_decimation(state: &mut EngineState, var: usize, value: usize) -> Result<()> {
    state.decimate(var, value)
}

/// Whether the policy's trigger fires on the current state.
pub fn trigger_fires(policy: &DecimationPolicy, state: &EngineState, cfg: &EngineConfig) -> bool {
    match policy.trigger {
        Trigger::Converge { eps, fallback } => trigger_converge(state, eps, fallback),
        Trigger::TimeLimit(limit) => trigger_time(state, limit),
        Trigger::Frequency(spec) => trigger_frequency(state, spec, cfg.limit),
    }
}

/// Variables chosen for decimation, ascending.
fn select(
    policy: &DecimationPolicy,
    state: &EngineState,
    fg: &FactorGraph,
    rng: &mut RngStream,
) -> Vec<usize> {
    let candidates = match policy.filter {
        Filter::All => filter_all(state),
        Filter::Neighbors => filter_neighbors(state, fg),
    };
    let mut chosen = match policy.perform {
        Perform::MaxRand => perform_max_rand(&candidates, rng),
        Perform::MaxEntropy => perform_max_entropy(&candidates, state, policy.entropy_order),
        Perform::MaxMarginal => perform_max_marginal(&candidates, state),
        Perform::ThresholdEntropy(t) => {
            perform_threshold_entropy(&candidates, state, t, policy.entropy_order)
        }
    };
    chosen.sort_unstable();
    chosen
}

/// Runs Max-Sum with decimation until every variable is fixed.
///
/// Each iteration performs one engine round and then checks the trigger.
/// When it fires, the chosen variables are all assigned from the marginals
/// of that moment, then decimated in ascending id order.
pub fn run_decimaxsum(
    dcop: &Dcop,
    policy: &DecimationPolicy,
    cfg: &EngineConfig,
    rng: &mut RngStream,
) -> Result<RunOutcome> {
    dcop.validate()?;
    cfg.validate()?;
    policy.validate(dcop.num_variables())?;
    let fg = FactorGraph::build(dcop);
    let mut state = EngineState::new(dcop).with_trace(cfg.trace);

    while !state.all_decimated() {
        state.step(cfg);
        if !trigger_fires(policy, &state, cfg) {
            continue;
        }
        let chosen = select(policy, &state, &fg, rng);
        let values: Vec<(usize, usize)> = chosen
            .into_iter()
            .map(|x| {
                let v = match policy.assign {
                    Assign::MaxMarginal => assign_max_marginal(x, &state),
                    Assign::Sample => assign_sample_marginal(x, &state, rng),
                };
                (x, v)
            })
            .collect();
        for (x, v) in values {
            apply_decimation(&mut state, x, v)?;
        }
    }

    let assignment = state.decode();
    let utility = dcop.total_utility(&assignment)?;
    Ok(RunOutcome {
        assignment,
        utility,
        msgs_sent: state.msgs_sent(),
        iterations: state.t(),
        decimations: state.decimations(),
        trace: state.take_trace(),
    })
}
