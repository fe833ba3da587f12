//! Toroidal Ising grid instances.
//!
//! Variable `x{r*side+c}` sits at row `r`, column `c`. Each grid link carries
//! the cost `κ` when its endpoints agree and `-κ` otherwise, with
//! `κ ~ U[-β, β]`; each variable also carries a unary cost `(κ_i, -κ_i)` with
//! `κ_i ~ U[-unary_bound, unary_bound]`.
//!
//! Draw order, from one [`RngStream`] seeded with `seed`: the right-links in
//! row-major order, then the down-links in row-major order, then the unaries.

use crate::dcop::{Dcop, Factor, Sense, Variable};
use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const DEFAULT_BETA: f64 = 1.6;
pub const DEFAULT_UNARY_BOUND: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingParams {
    pub side: usize,
    pub beta: f64,
    pub unary_bound: f64,
    pub seed: u64,
}

impl IsingParams {
    pub fn new(side: usize, seed: u64) -> Self {
        IsingParams {
            side,
            beta: DEFAULT_BETA,
            unary_bound: DEFAULT_UNARY_BOUND,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.side < 2 {
            return Err(Error::Parameter(format!(
                "side must be >= 2, got {}",
                self.side
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Parameter(format!(
                "beta must be > 0, got {}",
                self.beta
            )));
        }
        if !(self.unary_bound >= 0.0 && self.unary_bound.is_finite()) {
            return Err(Error::Parameter(format!(
                "unary bound must be >= 0, got {}",
                self.unary_bound
            )));
        }
        Ok(())
    }
}

/// Generates a cost-sense Ising instance with `2·side²` couplings and `side²`
/// unary factors. On a side-2 torus the wrap-around links duplicate the
/// direct ones; they are kept as parallel factors.
pub fn generate_ising(p: &IsingParams) -> Result<Dcop> {
    p.validate()?;
    let s = p.side;
    let n = s * s;
    let at = |r: usize, c: usize| (r % s) * s + (c % s);
    let mut rng = RngStream::new(p.seed);
    let mut factors = Vec::with_capacity(3 * n);

    for (tag, dr, dc) in [("h", 0, 1), ("v", 1, 0)] {
        for r in 0..s {
            for c in 0..s {
                let k = rng.uniform_in(-p.beta, p.beta);
                factors.push(Factor::new(
                    format!("{tag}{}", at(r, c)),
                    vec![at(r, c), at(r + dr, c + dc)],
                    // stored as utilities: the negated costs
                    vec![-k, k, k, -k],
                ));
            }
        }
    }
    for i in 0..n {
        let k = rng.uniform_in(-p.unary_bound, p.unary_bound);
        factors.push(Factor::new(format!("u{i}"), vec![i], vec![-k, k]));
    }

    let variables = (0..n).map(|i| Variable::new(format!("x{i}"), 2)).collect();
    Ok(Dcop {
        sense: Sense::MinimizeCost,
        variables,
        factors,
        agents: (0..n).map(|i| format!("a{i}")).collect(),
    })
}

/// Coupling strength `κ` of a generated binary factor (its cost when the
/// endpoints agree).
pub fn coupling(f: &Factor) -> f64 {
    -f.table[0]
}
