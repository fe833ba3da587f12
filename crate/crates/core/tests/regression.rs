//! Frozen outputs on one seed-fixed 3x3 Ising instance. Any change here
//! means message passing, decimation or the RNG stream changed behaviour.

use decimaxsum::ising::{generate_ising, IsingParams};
use decimaxsum::{brute_force_optimum, Algorithm, Dcop, EngineConfig};

fn instance() -> Dcop {
    generate_ising(&IsingParams::new(3, 7)).unwrap()
}

const OPTIMUM: f64 = 10.223657268445812;
const OPTIMAL_VALUES: [usize; 9] = [0, 0, 1, 1, 0, 1, 0, 0, 1];

fn check(
    algo: &str,
    cost: f64,
    msgs: u64,
    iterations: u64,
    decimations: usize,
    values: [usize; 9],
) {
    let a: Algorithm = algo.parse().unwrap();
    let out = a.run(&instance(), &EngineConfig::default(), 11).unwrap();
    assert!(
        (out.cost() - cost).abs() < 1e-9,
        "{algo}: cost {}",
        out.cost()
    );
    assert_eq!(out.msgs_sent, msgs, "{algo}");
    assert_eq!(out.iterations, iterations, "{algo}");
    assert_eq!(out.decimations, decimations, "{algo}");
    assert_eq!(out.assignment.to_values().unwrap(), values, "{algo}");
}

#[test]
fn enumeration_oracle() {
    let (a, u) = brute_force_optimum(&instance()).unwrap();
    assert!((u - OPTIMUM).abs() < 1e-12);
    assert_eq!(a.to_values().unwrap(), OPTIMAL_VALUES);
}

#[test]
fn max_sum_oscillates_to_the_limit() {
    check(
        "maxsum",
        3.343915401602246,
        75638,
        1000,
        0,
        [0, 0, 1, 0, 0, 1, 0, 1, 0],
    );
}

#[test]
fn alternating_variants_reach_the_optimum() {
    check("maxsum_ad", -OPTIMUM, 470, 360, 0, OPTIMAL_VALUES);
    check("maxsum_ad_vp", -OPTIMUM, 349, 252, 0, OPTIMAL_VALUES);
}

#[test]
fn decimation_presets() {
    check(
        "mooij",
        -6.461479962980208,
        18581,
        318,
        9,
        [1, 1, 1, 0, 1, 1, 0, 0, 1],
    );
    check("montanari", -OPTIMUM, 7579, 124, 9, OPTIMAL_VALUES);
    check(
        "decimaxsum:trigger=freq:rate:2;filter=all;perform=max_entropy;assign=max_marginal",
        -6.937923610189095,
        503,
        18,
        9,
        [0, 0, 0, 1, 0, 1, 1, 1, 0],
    );
}
