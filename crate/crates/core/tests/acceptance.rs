//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use decimaxsum::dcop::{enumerate_extremes, DEFAULT_ENUMERATION_CAP};
use decimaxsum::decimation::select::entropy_of_marginal;
use decimaxsum::decimation::{EntropyOrder, FrequencySpec, Trigger};
use decimaxsum::harness::{
    emit_results, instance_seed, run_experiment, run_seed, ExperimentConfig, Format,
};
use decimaxsum::ising::{generate_ising, IsingParams};
use decimaxsum::variants::{
    preset_montanari, preset_mooij, run_max_sum, run_max_sum_ad_vp, AdConfig, DECIMAXSUM_GRID,
};
use decimaxsum::{
    brute_force_optimum, run_decimaxsum, slice_factor, Dcop, DecimationPolicy, EngineConfig,
    RngStream,
};

const BASE_SEED: u64 = 20_240_601;
const FAST_POLICY: &str = "trigger=freq:rate:2;filter=all;perform=max_entropy;assign=max_marginal";

const TREE_TOL: f64 = 1e-9;
const TREE_BUDGET: Duration = Duration::from_secs(5);
const GAP_BOUND: f64 = 0.10;
const GAP_BUDGET: Duration = Duration::from_secs(60);
const MSG_LIMIT: u64 = 200;
const VP_RATIO_BOUND: f64 = 1.3;
const ENTROPY_TOL: f64 = 1e-12;
const MONTANARI_RUNS: usize = 30;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// The criterion-2 set: ten 3x3 and ten 4x4 instances.
fn ising_set() -> Vec<Dcop> {
    [3usize, 4]
        .iter()
        .flat_map(|&side| {
            (0..10).map(move |p| {
                generate_ising(&IsingParams {
                    seed: instance_seed(BASE_SEED, side, p),
                    ..IsingParams::new(side, 0)
                })
                .expect("valid Ising parameters")
            })
        })
        .collect()
}

fn fast_policy() -> DecimationPolicy {
    FAST_POLICY.parse().expect("valid policy")
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut rng = RngStream::new(BASE_SEED);
    let mut exact = 0;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = 2 + (rng.next_u64() % 11) as usize;
        let d = common::random_tree(&mut rng, n, -2.0, 2.0);
        let (_, opt) = brute_force_optimum(&d).unwrap();
        let got = run_max_sum(&d, &EngineConfig::default()).unwrap().utility;
        let gap = (got - opt).abs();
        worst = worst.max(gap);
        if gap <= TREE_TOL {
            exact += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        exact == 50 && elapsed < TREE_BUDGET,
        format!(
            "{exact}/50 exact, max |gap| {worst:.3e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2(set: &[Dcop]) -> Verdict {
    let start = Instant::now();
    let policy = fast_policy();
    let mut gaps = Vec::new();
    for (i, d) in set.iter().enumerate() {
        let (_, best, worst) = enumerate_extremes(d, DEFAULT_ENUMERATION_CAP).unwrap();
        let out = run_decimaxsum(
            d,
            &policy,
            &EngineConfig::default(),
            &mut RngStream::new(i as u64),
        )
        .unwrap();
        // cost = -utility, so the cost range is best - worst in utility terms
        gaps.push((best - out.utility) / (best - worst));
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let max = gaps.iter().cloned().fold(0.0, f64::max);
    let elapsed = start.elapsed();
    verdict(
        mean <= GAP_BOUND && elapsed < GAP_BUDGET,
        format!(
            "mean normalized gap {mean:.4} (max {max:.4}) over {} instances, {:.2}s",
            set.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3(set: &[Dcop]) -> Verdict {
    let cfg = EngineConfig {
        limit: MSG_LIMIT,
        ..EngineConfig::default()
    };
    let policy = fast_policy();
    let mut fewer = 0;
    let mut report = Vec::new();
    for (i, d) in set.iter().enumerate() {
        let deci = run_decimaxsum(d, &policy, &cfg, &mut RngStream::new(i as u64)).unwrap();
        let plain = run_max_sum(d, &cfg).unwrap();
        if deci.msgs_sent < plain.msgs_sent {
            fewer += 1;
        } else {
            report.push(format!("#{i}: {} vs {}", deci.msgs_sent, plain.msgs_sent));
        }
    }
    let mut detail = format!("decimation sent fewer messages on {fewer}/{}", set.len());
    if !report.is_empty() {
        detail.push_str(&format!(" (not fewer: {})", report.join(", ")));
    }
    verdict(fewer == set.len(), detail)
}

fn criterion_4(set: &[Dcop]) -> Verdict {
    let cfg = EngineConfig::default();
    let fast = fast_policy();
    let mut most_determined = fast;
    most_determined.entropy_order = EntropyOrder::Min;
    let montanari = preset_montanari();
    let (mut fast_cost, mut min_cost, mut mont_cost) = (0.0, 0.0, 0.0);
    for (i, d) in set.iter().enumerate() {
        let (side, p) = (if i < 10 { 3 } else { 4 }, i % 10);
        fast_cost += run_decimaxsum(d, &fast, &cfg, &mut RngStream::new(0))
            .unwrap()
            .cost();
        min_cost += run_decimaxsum(d, &most_determined, &cfg, &mut RngStream::new(0))
            .unwrap()
            .cost();
        // Montanari samples, so its per-instance cost is itself a mean over runs
        let mut c = 0.0;
        for r in 0..MONTANARI_RUNS {
            let seed = run_seed(BASE_SEED, side, p, r);
            c += run_decimaxsum(d, &montanari, &cfg, &mut RngStream::new(seed))
                .unwrap()
                .cost();
        }
        mont_cost += c / MONTANARI_RUNS as f64;
    }
    let n = set.len() as f64;
    let (fast_cost, min_cost, mont_cost) = (fast_cost / n, min_cost / n, mont_cost / n);
    verdict(
        fast_cost <= mont_cost,
        format!(
            "mean cost fast {fast_cost:.4} vs montanari {mont_cost:.4} \
             ({MONTANARI_RUNS} runs per instance); informational: entropy_order=min {min_cost:.4}"
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = RngStream::new(BASE_SEED ^ 5);
    let mut ratios = Vec::new();
    let mut over = 0;
    for _ in 0..20 {
        let n = 8 + (rng.next_u64() % 7) as usize;
        let extra = 2 + (rng.next_u64() % (n as u64 / 2)) as usize;
        let d = common::random_loopy(&mut rng, n, extra, 0.0, 1.0);
        let (_, opt) = brute_force_optimum(&d).unwrap();
        let got = run_max_sum_ad_vp(&d, &AdConfig::new(), &EngineConfig::default())
            .unwrap()
            .utility;
        let r = opt / got;
        if r > VP_RATIO_BOUND {
            over += 1;
        }
        ratios.push(r);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    verdict(
        mean <= VP_RATIO_BOUND,
        format!("mean optimum/achieved {mean:.4} (max {max:.4}, {over} instances above the bound)"),
    )
}

fn criterion_6() -> Verdict {
    let mut failures = Vec::new();

    // (a) identical seeds give byte-identical tables
    let cfg = ExperimentConfig {
        algorithms: vec![
            "maxsum".into(),
            "montanari".into(),
            format!("decimaxsum:{FAST_POLICY}"),
            "decimaxsum:trigger=freq:rate:2;filter=all;perform=max_rand;assign=sample".into(),
        ],
        sides: vec![3, 4],
        problems_per_setting: 3,
        runs_per_problem: 2,
        base_seed: BASE_SEED,
        beta: 1.6,
        unary_bound: 0.05,
        engine: Default::default(),
        record_timing: false,
    };
    let tables: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
        .map(|_| {
            let rows = run_experiment(&cfg).unwrap();
            (
                emit_results(&rows, Format::Csv).unwrap(),
                emit_results(&rows, Format::Json).unwrap(),
            )
        })
        .collect();
    if tables[0] != tables[1] {
        failures.push("(a) tables differ".to_string());
    }

    // (b) slicing conservation, checked against every full-scope tuple
    let mut rng = RngStream::new(BASE_SEED ^ 6);
    let mut checked = 0;
    for _ in 0..200 {
        let arity = 1 + (rng.next_u64() % 3) as usize;
        let (f, sizes) = common::random_factor(&mut rng, 6, arity, 4);
        let pos = (rng.next_u64() % arity as u64) as usize;
        let value = (rng.next_u64() % sizes[pos] as u64) as usize;
        let sliced = slice_factor(&f, &sizes, f.scope[pos], value).unwrap();
        let mut rest_sizes = sizes.clone();
        rest_sizes.remove(pos);
        let ok = common::tuples(&rest_sizes)
            .iter()
            .enumerate()
            .all(|(k, rest)| {
                let mut full = rest.clone();
                full.insert(pos, value);
                let idx = decimaxsum::Factor::index_of(&full, &sizes);
                sliced.table[k] == f.table[idx]
            });
        if ok && sliced.table.len() == rest_sizes.iter().product::<usize>() {
            checked += 1;
        }
    }
    if checked != 200 {
        failures.push(format!("(b) {checked}/200 slices conserve utility"));
    }

    // (c) uniform two-value marginal has entropy ln 2
    for c in [0.0, 1.0, -3.5, 42.0, 1e6] {
        let h = entropy_of_marginal(&[c, c]);
        if (h - std::f64::consts::LN_2).abs() > ENTROPY_TOL {
            failures.push(format!("(c) entropy([{c}, {c}]) = {h}"));
        }
    }

    // (d) suppression does not change what is decoded
    let mut rng = RngStream::new(BASE_SEED ^ 7);
    let mut same = 0;
    for i in 0..20 {
        let d = if i % 2 == 0 {
            generate_ising(&IsingParams::new(3 + i % 3, rng.next_u64())).unwrap()
        } else {
            let n = 6 + (rng.next_u64() % 7) as usize;
            common::random_loopy(&mut rng, n, 3, -2.0, 2.0)
        };
        let on = EngineConfig::default();
        let off = EngineConfig {
            suppression: false,
            ..on
        };
        let a = run_max_sum(&d, &on).unwrap();
        let b = run_max_sum(&d, &off).unwrap();
        let p = fast_policy();
        let c = run_decimaxsum(&d, &p, &on, &mut RngStream::new(1)).unwrap();
        let e = run_decimaxsum(&d, &p, &off, &mut RngStream::new(1)).unwrap();
        if a.assignment == b.assignment && c.assignment == e.assignment {
            same += 1;
        }
    }
    if same != 20 {
        failures.push(format!("(d) {same}/20 instances decode identically"));
    }

    let pass = failures.is_empty();
    let detail = if pass {
        "tables byte-identical, 200/200 slices conserve, entropy ln 2, 20/20 identical decodes"
            .to_string()
    } else {
        failures.join("; ")
    };
    verdict(pass, detail)
}

/// Largest number of iterations one decimation phase can last.
fn phase_bound(policy: &DecimationPolicy, num_vars: usize, cfg: &EngineConfig) -> u64 {
    match policy.trigger {
        Trigger::Converge { fallback, .. } => fallback,
        Trigger::TimeLimit(limit) => limit,
        Trigger::Frequency(FrequencySpec::Rate(r)) => r.max(1),
        Trigger::Frequency(FrequencySpec::Budget(b)) => (b / num_vars.max(1) as u64).max(1),
        Trigger::Frequency(FrequencySpec::Decreasing) => cfg.limit,
    }
}

fn criterion_7(set: &[Dcop]) -> Verdict {
    let cfg = EngineConfig::default();
    let mut policies: Vec<DecimationPolicy> =
        DECIMAXSUM_GRID.iter().map(|p| p.parse().unwrap()).collect();
    policies.push(preset_montanari());
    policies.push(preset_mooij());
    let mut runs = 0;
    let mut bad = Vec::new();
    for (i, d) in set.iter().enumerate() {
        let n = d.num_variables();
        for policy in &policies {
            let out = run_decimaxsum(d, policy, &cfg, &mut RngStream::new(i as u64)).unwrap();
            let bound = n as u64 * phase_bound(policy, n, &cfg);
            runs += 1;
            if out.decimations != n || out.iterations > bound {
                bad.push(format!(
                    "#{i} {policy}: {} decimations, {} iterations (bound {bound})",
                    out.decimations, out.iterations
                ));
            }
        }
    }
    let mut detail = format!("{}/{runs} runs within bounds", runs - bad.len());
    if !bad.is_empty() {
        detail.push_str(&format!(": {}", bad.join("; ")));
    }
    verdict(bad.is_empty(), detail)
}

fn main() -> ExitCode {
    let set = ising_set();
    let results = [
        ("1 tree exactness", criterion_1()),
        ("2 decimation oracle gap", criterion_2(&set)),
        ("3 message reduction", criterion_3(&set)),
        ("4 relative ordering", criterion_4(&set)),
        ("5 AD_VP ratio", criterion_5()),
        ("6 determinism and conservation", criterion_6()),
        ("7 termination bound", criterion_7(&set)),
    ];
    let mut failed = 0;
    for (name, v) in &results {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    println!(
        "{}/{} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
