//! Experiment sweeps over Ising instances: algorithm × side × problem × run.
//!
//! Seeds are derived, never drawn: the instance for `(side, problem)` uses
//! `derive_seed(base_seed, [side, problem])` and the run uses
//! `derive_seed(base_seed, [side, problem, run])`, so every cell can be
//! regenerated on its own.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{EngineConfig, Normalization};
use crate::error::{Error, Result};
use crate::ising::{generate_ising, IsingParams, DEFAULT_BETA, DEFAULT_UNARY_BOUND};
use crate::rng::derive_seed;
use crate::variants::Algorithm;

/// Engine settings a config file may override.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineOverrides {
    pub eps: Option<f64>,
    pub limit: Option<u64>,
    pub suppression: Option<bool>,
    pub normalization: Option<String>,
}

impl EngineOverrides {
    pub fn apply(&self, base: &EngineConfig) -> Result<EngineConfig> {
        let mut cfg = base.clone();
        if let Some(e) = self.eps {
            cfg.eps = e;
        }
        if let Some(l) = self.limit {
            cfg.limit = l;
        }
        if let Some(s) = self.suppression {
            cfg.suppression = s;
        }
        if let Some(n) = &self.normalization {
            cfg.normalization = Normalization::parse(n)
                .ok_or_else(|| Error::Parameter(format!("unknown normalization {n:?}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

fn default_unary_bound() -> f64 {
    DEFAULT_UNARY_BOUND
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithms: Vec<String>,
    pub sides: Vec<usize>,
    pub problems_per_setting: usize,
    pub runs_per_problem: usize,
    pub base_seed: u64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_unary_bound")]
    pub unary_bound: f64,
    #[serde(default)]
    pub engine: EngineOverrides,
    /// Record wall-clock time per run; off gives byte-reproducible tables.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty()
            || self.sides.is_empty()
            || self.problems_per_setting == 0
            || self.runs_per_problem == 0
        {
            return Err(Error::Parameter(
                "experiment counts must all be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn ising_params(&self, side: usize, problem: usize) -> IsingParams {
        IsingParams {
            side,
            beta: self.beta,
            unary_bound: self.unary_bound,
            seed: instance_seed(self.base_seed, side, problem),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.algorithms.len() * self.sides.len() * self.problems_per_setting * self.runs_per_problem
    }
}

pub fn instance_seed(base: u64, side: usize, problem: usize) -> u64 {
    derive_seed(base, &[side as u64, problem as u64])
}

pub fn run_seed(base: u64, side: usize, problem: usize, run: usize) -> u64 {
    derive_seed(base, &[side as u64, problem as u64, run as u64])
}

/// One row of results: a single run of one algorithm on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub algorithm: String,
    pub instance: String,
    pub side: usize,
    pub problem: usize,
    pub run: usize,
    pub seed: u64,
    pub final_cost: f64,
    pub msgs_sent: u64,
    pub iterations: u64,
    pub decimations: usize,
    pub wall_ms: f64,
}

/// Runs one cell of the grid.
pub fn run_cell(
    cfg: &ExperimentConfig,
    engine: &EngineConfig,
    algorithm: &Algorithm,
    label: &str,
    side: usize,
    problem: usize,
    run: usize,
) -> Result<RunMetrics> {
    let params = cfg.ising_params(side, problem);
    let dcop = generate_ising(&params)?;
    let seed = run_seed(cfg.base_seed, side, problem, run);
    let start = Instant::now();
    let out = algorithm.run(&dcop, engine, seed)?;
    let wall_ms = if cfg.record_timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(RunMetrics {
        algorithm: label.to_string(),
        instance: format!("ising-s{side}-p{problem}"),
        side,
        problem,
        run,
        seed,
        final_cost: out.cost(),
        msgs_sent: out.msgs_sent,
        iterations: out.iterations,
        decimations: out.decimations,
        wall_ms,
    })
}

/// Runs every cell. Cells execute in parallel; rows come back sorted by
/// (side, problem, run, algorithm position in the config).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunMetrics>> {
    run_experiment_with(cfg, &EngineConfig::default())
}

pub fn run_experiment_with(cfg: &ExperimentConfig, base: &EngineConfig) -> Result<Vec<RunMetrics>> {
    cfg.validate()?;
    let engine = cfg.engine.apply(base)?;
    let algorithms: Vec<Algorithm> = cfg
        .algorithms
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    let labels: Vec<String> = algorithms.iter().map(Algorithm::to_string).collect();

    let mut cells = Vec::with_capacity(cfg.num_rows());
    for &side in &cfg.sides {
        for problem in 0..cfg.problems_per_setting {
            for run in 0..cfg.runs_per_problem {
                for a in 0..algorithms.len() {
                    cells.push((side, problem, run, a));
                }
            }
        }
    }
    cells
        .par_iter()
        .map(|&(side, problem, run, a)| {
            run_cell(cfg, &engine, &algorithms[a], &labels[a], side, problem, run).map_err(|e| {
                Error::Cell {
                    context: format!(
                        "cell side={side} problem={problem} run={run} algorithm={}",
                        labels[a]
                    ),
                    source: Box::new(e),
                }
            })
        })
        .collect()
}

/// Mean results per (algorithm, side): averaged over runs of each problem,
/// then over problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: String,
    pub side: usize,
    pub problems: usize,
    pub mean_final_cost: f64,
    pub mean_msgs_sent: f64,
    pub mean_iterations: f64,
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = xs
        .into_iter()
        .fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Two-level averaging; output ordered by first appearance of the algorithm,
/// then side.
pub fn aggregate(rows: &[RunMetrics]) -> Vec<AggregateRow> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<(usize, usize), BTreeMap<usize, Vec<&RunMetrics>>> = BTreeMap::new();
    for r in rows {
        let a = match order.iter().position(|&x| x == r.algorithm) {
            Some(i) => i,
            None => {
                order.push(&r.algorithm);
                order.len() - 1
            }
        };
        groups
            .entry((a, r.side))
            .or_default()
            .entry(r.problem)
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((a, side), problems)| {
            let per_problem: Vec<(f64, f64, f64)> = problems
                .values()
                .map(|runs| {
                    (
                        mean(runs.iter().map(|r| r.final_cost)),
                        mean(runs.iter().map(|r| r.msgs_sent as f64)),
                        mean(runs.iter().map(|r| r.iterations as f64)),
                    )
                })
                .collect();
            AggregateRow {
                algorithm: order[a].to_string(),
                side,
                problems: per_problem.len(),
                mean_final_cost: mean(per_problem.iter().map(|p| p.0)),
                mean_msgs_sent: mean(per_problem.iter().map(|p| p.1)),
                mean_iterations: mean(per_problem.iter().map(|p| p.2)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Format(s.to_string())),
        }
    }
}

const RUN_HEADER: &str =
    "algorithm,instance,side,problem,run,seed,final_cost,msgs_sent,iterations,decimations,wall_ms";
const AGGREGATE_HEADER: &str =
    "algorithm,side,problems,mean_final_cost,mean_msgs_sent,mean_iterations";

fn to_csv<T: Serialize>(rows: &[T], header: &str) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn to_json<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(rows).expect("rows always serialize");
    out.push(b'\n');
    out
}

/// Renders the per-run table.
pub fn emit_results(rows: &[RunMetrics], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => to_csv(rows, RUN_HEADER),
        Format::Json => Ok(to_json(rows)),
    }
}

/// Renders the aggregate table.
pub fn emit_aggregate(rows: &[AggregateRow], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => to_csv(rows, AGGREGATE_HEADER),
        Format::Json => Ok(to_json(rows)),
    }
}

/// Reads a per-run CSV table back.
pub fn read_results_csv(bytes: &[u8]) -> Result<Vec<RunMetrics>> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}
