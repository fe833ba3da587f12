use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use decimaxsum::engine::{EngineConfig, Normalization, DEFAULT_EPS, DEFAULT_LIMIT};
use decimaxsum::harness::{self, ExperimentConfig, Format};
use decimaxsum::io::{parse_dcop, serialize_dcop};
use decimaxsum::ising::{generate_ising, IsingParams, DEFAULT_BETA, DEFAULT_UNARY_BOUND};
use decimaxsum::Algorithm;

#[derive(Parser)]
#[command(
    name = "decimaxsum",
    version,
    about = "Max-Sum and decimation solvers for DCOPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a toroidal Ising instance.
    Gen {
        #[arg(long)]
        side: usize,
        #[arg(long, default_value_t = DEFAULT_BETA)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_UNARY_BOUND)]
        unary_bound: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a problem file and print the result as JSON.
    Solve {
        /// maxsum | maxsum_ad | maxsum_ad_vp | montanari | mooij | decimaxsum:<policy>
        #[arg(long)]
        algo: String,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: u64,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// mean | max | none
        #[arg(long, default_value = "mean")]
        normalization: String,
        /// Send every message each round, changed or not.
        #[arg(long)]
        no_suppression: bool,
        /// Write per-iteration JSON lines to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Run an experiment grid described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Row format: csv | json
        #[arg(long, default_value = "csv")]
        out: String,
        /// Write rows here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the aggregate table (CSV) here.
        #[arg(long)]
        aggregate: Option<PathBuf>,
        /// Zero the wall-time column so tables are reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
    },
    /// Aggregate a per-run CSV into means per algorithm and side.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Output CSV; stdout when omitted or "-".
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct SolveReport<'a> {
    algorithm: String,
    problem: &'a Path,
    seed: u64,
    assignment: serde_json::Map<String, serde_json::Value>,
    utility: f64,
    cost: f64,
    msgs_sent: u64,
    iterations: u64,
    decimations: usize,
    wall_ms: f64,
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        _ => std::io::stdout().write_all(bytes).map_err(Into::into),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen {
            side,
            beta,
            unary_bound,
            seed,
            out,
        } => {
            let dcop = generate_ising(&IsingParams {
                side,
                beta,
                unary_bound,
                seed,
            })?;
            write_out(out.as_deref(), &serialize_dcop(&dcop))?;
        }
        Command::Solve {
            algo,
            problem,
            seed,
            limit,
            eps,
            normalization,
            no_suppression,
            trace,
        } => {
            let algorithm: Algorithm = algo.parse()?;
            let bytes =
                fs::read(&problem).with_context(|| format!("reading {}", problem.display()))?;
            let dcop =
                parse_dcop(&bytes).with_context(|| format!("loading {}", problem.display()))?;
            let cfg = EngineConfig {
                eps,
                limit,
                normalization: Normalization::parse(&normalization)
                    .with_context(|| format!("unknown normalization {normalization:?}"))?,
                suppression: !no_suppression,
                trace,
            };
            let start = Instant::now();
            let out = algorithm.run(&dcop, &cfg, seed)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            if trace {
                let mut err = std::io::stderr().lock();
                for rec in &out.trace {
                    serde_json::to_writer(&mut err, rec)?;
                    writeln!(err)?;
                }
            }
            let assignment = dcop
                .variables
                .iter()
                .zip(&out.assignment.values)
                .map(|(v, d)| {
                    let label = d.map(|d| v.domain[d].clone()).unwrap_or_default();
                    (v.id.clone(), serde_json::Value::String(label))
                })
                .collect();
            let report = SolveReport {
                algorithm: algorithm.to_string(),
                problem: &problem,
                seed,
                assignment,
                utility: out.utility,
                cost: out.cost(),
                msgs_sent: out.msgs_sent,
                iterations: out.iterations,
                decimations: out.decimations,
                wall_ms,
            };
            let mut s = serde_json::to_vec_pretty(&report)?;
            s.push(b'\n');
            write_out(None, &s)?;
        }
        Command::Bench {
            config,
            out,
            output,
            aggregate,
            no_timing,
        } => {
            let format: Format = out.parse()?;
            let text =
                fs::read(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg: ExperimentConfig = serde_json::from_slice(&text)
                .with_context(|| format!("parsing {}", config.display()))?;
            if no_timing {
                cfg.record_timing = false;
            }
            let rows = harness::run_experiment(&cfg)?;
            write_out(output.as_deref(), &harness::emit_results(&rows, format)?)?;
            if let Some(path) = aggregate {
                let agg = harness::aggregate(&rows);
                write_out(Some(&path), &harness::emit_aggregate(&agg, Format::Csv)?)?;
            }
        }
        Command::Aggregate { input, out } => {
            let bytes = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let rows = harness::read_results_csv(&bytes)?;
            let agg = harness::aggregate(&rows);
            write_out(out.as_deref(), &harness::emit_aggregate(&agg, Format::Csv)?)?;
        }
    }
    Ok(())
}
