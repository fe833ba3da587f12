//! Baseline solvers and literature presets: plain Max-Sum, Max-Sum_AD,
//! Max-Sum_AD_VP, Montanari- and Mooij-style decimation.

use std::fmt;
use std::str::FromStr;

use crate::dcop::Dcop;
use crate::decimation::{
    run_decimaxsum, Assign, DecimationPolicy, Filter, Perform, Trigger, DEFAULT_FALLBACK,
};
use crate::engine::{Direction, Edge, EngineConfig, EngineState};
use crate::error::{Error, Result};
use crate::outcome::RunOutcome;
use crate::rng::RngStream;

fn finish(dcop: &Dcop, mut state: EngineState) -> Result<RunOutcome> {
    let assignment = state.decode();
    let utility = dcop.total_utility(&assignment)?;
    Ok(RunOutcome {
        assignment,
        utility,
        msgs_sent: state.msgs_sent(),
        iterations: state.t(),
        decimations: 0,
        trace: state.take_trace(),
    })
}

/// Flooding Max-Sum until quiescence or `cfg.limit` iterations, decoded by
/// marginal argmax.
pub fn run_max_sum(dcop: &Dcop, cfg: &EngineConfig) -> Result<RunOutcome> {
    dcop.validate()?;
    cfg.validate()?;
    let mut state = EngineState::new(dcop).with_trace(cfg.trace);
    while state.t() < cfg.limit {
        state.step(cfg);
        if state.has_converged() {
            break;
        }
    }
    finish(dcop, state)
}

/// A node of the factor graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Variable(usize),
    Factor(usize),
}

/// Total order over nodes defining the acyclic orientation used by the
/// alternating-direction variants.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum NodeOrder {
    /// Variables by id; each variable is preceded by its unary factors and
    /// followed by the larger factors whose first-ordered member it is. A
    /// binary factor thus sits between its two variables.
    #[default]
    Interleaved,
    /// All variables, then all factors, each ascending.
    Creation,
    Custom(Vec<Node>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AdConfig {
    /// Iterations per direction; `None` means the number of graph nodes.
    pub phase_length: Option<u64>,
    pub node_order: NodeOrder,
    /// First phase (1-based) with value propagation on. Only the VP variant
    /// reads it.
    pub vp_start_phase: u64,
}

pub const DEFAULT_VP_START_PHASE: u64 = 3;

impl AdConfig {
    pub fn new() -> Self {
        AdConfig {
            phase_length: None,
            node_order: NodeOrder::Interleaved,
            vp_start_phase: DEFAULT_VP_START_PHASE,
        }
    }
}

/// Position of every variable and factor in the node order.
struct Positions {
    var: Vec<usize>,
    factor: Vec<usize>,
}

impl Positions {
    fn build(dcop: &Dcop, order: &NodeOrder) -> Result<Self> {
        let nv = dcop.num_variables();
        let nf = dcop.factors.len();
        let seq: Vec<Node> = match order {
            NodeOrder::Creation => (0..nv)
                .map(Node::Variable)
                .chain((0..nf).map(Node::Factor))
                .collect(),
            NodeOrder::Interleaved => {
                let mut before = vec![Vec::new(); nv];
                let mut after = vec![Vec::new(); nv];
                let mut scalars = Vec::new();
                for (m, f) in dcop.factors.iter().enumerate() {
                    match f.scope.iter().min() {
                        None => scalars.push(Node::Factor(m)),
                        Some(&v) if f.scope.len() == 1 => before[v].push(Node::Factor(m)),
                        Some(&v) => after[v].push(Node::Factor(m)),
                    }
                }
                let mut seq = scalars;
                for v in 0..nv {
                    seq.append(&mut before[v]);
                    seq.push(Node::Variable(v));
                    seq.append(&mut after[v]);
                }
                seq
            }
            NodeOrder::Custom(seq) => seq.clone(),
        };
        let mut var = vec![usize::MAX; nv];
        let mut factor = vec![usize::MAX; nf];
        for (p, node) in seq.iter().enumerate() {
            let slot = match *node {
                Node::Variable(v) if v < nv => &mut var[v],
                Node::Factor(m) if m < nf => &mut factor[m],
                _ => {
                    return Err(Error::Parameter(format!(
                        "node order names unknown node {node:?}"
                    )))
                }
            };
            if *slot != usize::MAX {
                return Err(Error::Parameter(format!("node order repeats {node:?}")));
            }
            *slot = p;
        }
        if seq.len() != nv + nf {
            return Err(Error::Parameter(
                "node order is not a permutation of all nodes".into(),
            ));
        }
        Ok(Positions { var, factor })
    }

    /// Whether edge `e` points forward (from the lower to the higher position).
    fn forward(&self, e: Edge) -> bool {
        let (pv, pf) = (self.var[e.var], self.factor[e.factor]);
        match e.direction {
            Direction::ToFactor => pv < pf,
            Direction::ToVariable => pf < pv,
        }
    }
}

fn run_alternating(
    dcop: &Dcop,
    ad: &AdConfig,
    cfg: &EngineConfig,
    value_propagation: bool,
) -> Result<RunOutcome> {
    dcop.validate()?;
    cfg.validate()?;
    if ad.phase_length == Some(0) {
        return Err(Error::Parameter("phase length must be >= 1".into()));
    }
    if value_propagation && ad.vp_start_phase < 2 {
        return Err(Error::Parameter(
            "value propagation must start at phase 2 or later".into(),
        ));
    }
    let pos = Positions::build(dcop, &ad.node_order)?;
    let phase_length = ad
        .phase_length
        .unwrap_or((dcop.num_variables() + dcop.factors.len()).max(1) as u64);

    let mut state = EngineState::new(dcop).with_trace(cfg.trace);
    let mut phase_changes = 0u64;
    while state.t() < cfg.limit {
        let phase = state.t() / phase_length + 1;
        let forward = phase % 2 == 1;
        let vp = value_propagation && phase >= ad.vp_start_phase;
        state.step_scheduled(cfg, |e| pos.forward(e) == forward, vp);
        phase_changes += state.last_changed();
        if state.t().is_multiple_of(phase_length) {
            // The first phase only runs one direction; quiet there proves nothing.
            if phase_changes == 0 && phase >= 2 {
                break;
            }
            phase_changes = 0;
        }
    }
    finish(dcop, state)
}

/// Max-Sum on an acyclic orientation of the factor graph, flipping direction
/// every `phase_length` iterations. Stops at `cfg.limit` iterations or after a
/// full phase, from the second on, in which no message changed.
pub fn run_max_sum_ad(dcop: &Dcop, ad: &AdConfig, cfg: &EngineConfig) -> Result<RunOutcome> {
    run_alternating(dcop, ad, cfg, false)
}

/// [`run_max_sum_ad`] where, from `vp_start_phase` on, variables attach their
/// current argmax to outgoing messages and factors maximize only over the
/// attached values.
pub fn run_max_sum_ad_vp(dcop: &Dcop, ad: &AdConfig, cfg: &EngineConfig) -> Result<RunOutcome> {
    run_alternating(dcop, ad, cfg, true)
}

/// Converge trigger, uniform random variable, value sampled from its marginal.
pub fn preset_montanari() -> DecimationPolicy {
    DecimationPolicy::new(
        Trigger::Converge {
            eps: None,
            fallback: DEFAULT_FALLBACK,
        },
        Filter::All,
        Perform::MaxRand,
        Assign::Sample,
    )
}

/// Converge trigger, maximum-entropy variable, argmax value.
pub fn preset_mooij() -> DecimationPolicy {
    DecimationPolicy::new(
        Trigger::Converge {
            eps: None,
            fallback: DEFAULT_FALLBACK,
        },
        Filter::All,
        Perform::MaxEntropy,
        Assign::MaxMarginal,
    )
}

/// Algorithm selector: `maxsum | maxsum_ad | maxsum_ad_vp | montanari | mooij
/// | decimaxsum:<policy>`.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    MaxSum,
    MaxSumAd(AdConfig),
    MaxSumAdVp(AdConfig),
    Montanari,
    Mooij,
    DeciMaxSum(DecimationPolicy),
}

impl Algorithm {
    pub fn run(&self, dcop: &Dcop, cfg: &EngineConfig, seed: u64) -> Result<RunOutcome> {
        let mut rng = RngStream::new(seed);
        match self {
            Algorithm::MaxSum => run_max_sum(dcop, cfg),
            Algorithm::MaxSumAd(ad) => run_max_sum_ad(dcop, ad, cfg),
            Algorithm::MaxSumAdVp(ad) => run_max_sum_ad_vp(dcop, ad, cfg),
            Algorithm::Montanari => run_decimaxsum(dcop, &preset_montanari(), cfg, &mut rng),
            Algorithm::Mooij => run_decimaxsum(dcop, &preset_mooij(), cfg, &mut rng),
            Algorithm::DeciMaxSum(p) => run_decimaxsum(dcop, p, cfg, &mut rng),
        }
    }

    pub fn is_decimation(&self) -> bool {
        matches!(
            self,
            Algorithm::Montanari | Algorithm::Mooij | Algorithm::DeciMaxSum(_)
        )
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((head, policy)) = t.split_once(':') {
            if head.trim().eq_ignore_ascii_case("decimaxsum") {
                return policy
                    .parse()
                    .map(Algorithm::DeciMaxSum)
                    .map_err(|e| Error::Selector(format!("{s:?}: {e}")));
            }
        }
        match t.to_ascii_lowercase().as_str() {
            "maxsum" => Ok(Algorithm::MaxSum),
            "maxsum_ad" => Ok(Algorithm::MaxSumAd(AdConfig::new())),
            "maxsum_ad_vp" => Ok(Algorithm::MaxSumAdVp(AdConfig::new())),
            "montanari" => Ok(Algorithm::Montanari),
            "mooij" => Ok(Algorithm::Mooij),
            _ => Err(Error::Selector(format!("unknown algorithm {s:?}"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::MaxSum => f.write_str("maxsum"),
            Algorithm::MaxSumAd(_) => f.write_str("maxsum_ad"),
            Algorithm::MaxSumAdVp(_) => f.write_str("maxsum_ad_vp"),
            Algorithm::Montanari => f.write_str("montanari"),
            Algorithm::Mooij => f.write_str("mooij"),
            Algorithm::DeciMaxSum(p) => write!(f, "decimaxsum:{p}"),
        }
    }
}

/// The eleven decimation configurations of the comparison grid.
///
/// The source names the axes (converge, 2/3/5/10/20/100-periodic and
/// budget-periodic triggers; random or max-entropy choice; deterministic or
/// sampled values) but not the exact eleven combinations. This list is a
/// reconstruction: the max-entropy/deterministic pairing across every
/// trigger, plus random and sampling contrasts.
pub const DECIMAXSUM_GRID: [&str; 11] = [
    "trigger=freq:rate:2;filter=all;perform=max_entropy;assign=max_marginal",
    "trigger=freq:rate:3;filter=all;perform=max_entropy;assign=max_marginal",
    "trigger=freq:rate:5;filter=all;perform=max_entropy;assign=max_marginal",
    "trigger=freq:rate:10;filter=all;perform=max_entropy;assign=max_marginal",
    "trigger=freq:rate:20;filter=all;perform=max_entropy;assign=max_marginal",
    "trigger=freq:rate:100;filter=all;perform=max_entropy;assign=max_marginal",
    "trigger=freq:budget:1000;filter=all;perform=max_entropy;assign=max_marginal",
    "trigger=freq:rate:2;filter=all;perform=max_rand;assign=sample",
    "trigger=freq:rate:10;filter=all;perform=max_rand;assign=sample",
    "trigger=converge;filter=all;perform=max_rand;assign=max_marginal",
    "trigger=converge;filter=all;perform=max_entropy;assign=sample",
];

/// Selector strings for the full comparison: the eleven decimation
/// configurations followed by the five baselines.
pub fn comparison_selectors() -> Vec<String> {
    DECIMAXSUM_GRID
        .iter()
        .map(|p| format!("decimaxsum:{p}"))
        .chain(
            ["maxsum", "maxsum_ad", "maxsum_ad_vp", "montanari", "mooij"]
                .iter()
                .map(|s| s.to_string()),
        )
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dcop::{brute_force_optimum, Assignment, Factor};
    use crate::ising::{generate_ising, IsingParams};

    fn tree() -> Dcop {
        // star around x1 plus a tail: x0-x1, x1-x2, x1-x3, x3-x4
        let t = |a: f64, b: f64, c: f64, d: f64| vec![a, b, c, d];
        Dcop::with_domains(
            &[2; 5],
            vec![
                Factor::new("a", vec![0, 1], t(0.4, -1.2, 0.3, 0.9)),
                Factor::new("b", vec![1, 2], t(-0.1, 1.1, 0.8, -0.7)),
                Factor::new("c", vec![1, 3], t(1.5, -0.3, -0.6, 0.2)),
                Factor::new("d", vec![3, 4], t(-0.9, 0.4, 0.7, -0.2)),
                Factor::new("r", vec![4], vec![0.05, -0.05]),
            ],
        )
    }

    #[test]
    fn max_sum_is_optimal_on_a_tree() {
        let d = tree();
        let (_, opt) = brute_force_optimum(&d).unwrap();
        let out = run_max_sum(&d, &EngineConfig::default()).unwrap();
        assert!((out.utility - opt).abs() < 1e-9);
        assert!(out.iterations < 20);
    }

    #[test]
    fn single_variable_max_sum() {
        let d = Dcop::with_domains(&[3], vec![Factor::new("r", vec![0], vec![0.0, -1.0, 2.0])]);
        let out = run_max_sum(&d, &EngineConfig::default()).unwrap();
        assert_eq!(out.assignment, Assignment::total(vec![2]));
    }

    #[test]
    fn ad_variants_are_optimal_on_a_tree() {
        let d = tree();
        let (_, opt) = brute_force_optimum(&d).unwrap();
        let cfg = EngineConfig::default();
        for order in [NodeOrder::Interleaved, NodeOrder::Creation] {
            let ad = AdConfig {
                node_order: order,
                ..AdConfig::new()
            };
            let out = run_max_sum_ad(&d, &ad, &cfg).unwrap();
            assert!((out.utility - opt).abs() < 1e-9, "ad {:?}", ad.node_order);
            let out = run_max_sum_ad_vp(&d, &ad, &cfg).unwrap();
            assert!(
                (out.utility - opt).abs() < 1e-9,
                "ad_vp {:?}",
                ad.node_order
            );
        }
    }

    #[test]
    fn ad_sends_at_most_one_message_per_edge_per_round() {
        let d = generate_ising(&IsingParams::new(4, 2)).unwrap();
        let cfg = EngineConfig {
            suppression: false,
            limit: 60,
            trace: true,
            ..EngineConfig::default()
        };
        let edges = crate::graph::FactorGraph::build(&d).num_edges as u64;
        let out = run_max_sum_ad(&d, &AdConfig::new(), &cfg).unwrap();
        for rec in &out.trace {
            assert_eq!(rec.msgs_sent, edges);
        }
    }

    #[test]
    fn full_length_phase_is_a_single_sweep() {
        let d = generate_ising(&IsingParams::new(3, 2)).unwrap();
        let cfg = EngineConfig {
            limit: 30,
            suppression: false,
            ..EngineConfig::default()
        };
        let ad = AdConfig {
            phase_length: Some(30),
            ..AdConfig::new()
        };
        let out = run_max_sum_ad(&d, &ad, &cfg).unwrap();
        assert_eq!(out.iterations, 30);
        assert!(out.assignment.is_total());
    }

    #[test]
    fn custom_order_must_be_a_permutation() {
        let d = tree();
        let ad = AdConfig {
            node_order: NodeOrder::Custom(vec![Node::Variable(0)]),
            ..AdConfig::new()
        };
        assert!(run_max_sum_ad(&d, &ad, &EngineConfig::default()).is_err());
        let mut ad = AdConfig::new();
        ad.vp_start_phase = 1;
        assert!(run_max_sum_ad_vp(&d, &ad, &EngineConfig::default()).is_err());
    }

    #[test]
    fn interleaved_order_places_binary_factors_between_their_variables() {
        let d = generate_ising(&IsingParams::new(3, 0)).unwrap();
        let pos = Positions::build(&d, &NodeOrder::Interleaved).unwrap();
        for (m, f) in d.factors.iter().enumerate() {
            let lo = f.scope.iter().map(|&v| pos.var[v]).min().unwrap();
            let hi = f.scope.iter().map(|&v| pos.var[v]).max().unwrap();
            if f.scope.len() == 2 {
                assert!(lo < pos.factor[m] && pos.factor[m] < hi);
            } else {
                assert!(pos.factor[m] < lo);
            }
        }
    }

    #[test]
    fn presets_have_the_named_selections() {
        let m = preset_montanari();
        assert!(matches!(m.trigger, Trigger::Converge { .. }));
        assert_eq!(
            (m.filter, m.perform, m.assign),
            (Filter::All, Perform::MaxRand, Assign::Sample)
        );
        let m = preset_mooij();
        assert!(matches!(m.trigger, Trigger::Converge { .. }));
        assert_eq!(
            (m.filter, m.perform, m.assign),
            (Filter::All, Perform::MaxEntropy, Assign::MaxMarginal)
        );
    }

    #[test]
    fn mooij_ignores_the_seed() {
        let d = generate_ising(&IsingParams::new(3, 5)).unwrap();
        let cfg = EngineConfig::default();
        let a = Algorithm::Mooij.run(&d, &cfg, 1).unwrap();
        let b = Algorithm::Mooij.run(&d, &cfg, 999).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn montanari_on_a_single_variable_samples_its_unary() {
        let d = Dcop::with_domains(&[2], vec![Factor::new("r", vec![0], vec![0.0, 0.0])]);
        let cfg = EngineConfig::default();
        let ones: usize = (0..400)
            .map(|s| {
                Algorithm::Montanari
                    .run(&d, &cfg, s)
                    .unwrap()
                    .assignment
                    .get(0)
                    .unwrap()
            })
            .sum();
        assert!((150..250).contains(&ones), "{ones}");
    }

    #[test]
    fn selectors_round_trip() {
        for s in comparison_selectors() {
            let a: Algorithm = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert_eq!(comparison_selectors().len(), 16);
        assert!("maxsum_xyz".parse::<Algorithm>().is_err());
        assert!("decimaxsum:trigger=never".parse::<Algorithm>().is_err());
        assert_eq!("MaxSum".parse::<Algorithm>().unwrap(), Algorithm::MaxSum);
    }
}
