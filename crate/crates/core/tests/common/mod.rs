#![allow(dead_code)]

use decimaxsum::{Dcop, Factor, RngStream};

fn table(rng: &mut RngStream, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.uniform_in(lo, hi)).collect()
}

/// Random spanning tree over `n` binary variables: a binary factor per tree
/// edge and a unary factor per variable, utilities uniform in `[lo, hi)`.
pub fn random_tree(rng: &mut RngStream, n: usize, lo: f64, hi: f64) -> Dcop {
    let mut factors = Vec::new();
    for v in 1..n {
        let parent = (rng.next_u64() % v as u64) as usize;
        factors.push(Factor::new(
            format!("e{v}"),
            vec![parent, v],
            table(rng, 4, lo, hi),
        ));
    }
    for v in 0..n {
        factors.push(Factor::new(format!("u{v}"), vec![v], table(rng, 2, lo, hi)));
    }
    Dcop::with_domains(&vec![2; n], factors)
}

/// Random tree plus `extra` chords, so the graph has cycles whenever
/// `extra > 0` and a chord could be placed.
pub fn random_loopy(rng: &mut RngStream, n: usize, extra: usize, lo: f64, hi: f64) -> Dcop {
    let mut dcop = random_tree(rng, n, lo, hi);
    let mut pairs: Vec<(usize, usize)> = dcop
        .factors
        .iter()
        .filter(|f| f.scope.len() == 2)
        .map(|f| (f.scope[0].min(f.scope[1]), f.scope[0].max(f.scope[1])))
        .collect();
    let mut added = 0;
    let mut attempts = 0;
    while added < extra && attempts < 1000 {
        attempts += 1;
        let a = (rng.next_u64() % n as u64) as usize;
        let b = (rng.next_u64() % n as u64) as usize;
        let key = (a.min(b), a.max(b));
        if a == b || pairs.contains(&key) {
            continue;
        }
        pairs.push(key);
        dcop.factors.push(Factor::new(
            format!("c{added}"),
            vec![a, b],
            table(rng, 4, lo, hi),
        ));
        added += 1;
    }
    dcop
}

/// Random factor over distinct variables drawn from `0..num_vars`, with
/// domain sizes in `2..=max_domain`. Returns the factor and its scope sizes.
pub fn random_factor(
    rng: &mut RngStream,
    num_vars: usize,
    arity: usize,
    max_domain: usize,
) -> (Factor, Vec<usize>) {
    let mut scope = Vec::with_capacity(arity);
    while scope.len() < arity {
        let v = (rng.next_u64() % num_vars as u64) as usize;
        if !scope.contains(&v) {
            scope.push(v);
        }
    }
    let sizes: Vec<usize> = (0..arity)
        .map(|_| 2 + (rng.next_u64() % (max_domain as u64 - 1)) as usize)
        .collect();
    let len = sizes.iter().product();
    (Factor::new("f", scope, table(rng, len, -2.0, 2.0)), sizes)
}

/// All tuples over `sizes`, last position fastest.
pub fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..s).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}
