//! Decimation policies and their text form.
//!
//! ```text
//! trigger=converge[:EPS[:FALLBACK]] | time:LIMIT | freq:rate:R | freq:budget:B | freq:decreasing
//! filter=all | neighbors
//! perform=max_rand | max_entropy | max_marginal | threshold_entropy:T
//! assign=max_marginal | sample
//! entropy_order=max | min            (optional, default max)
//! ```
//!
//! Clauses are separated by `;` and parsed case-insensitively. An empty EPS
//! (`converge::200`) keeps the engine tolerance.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Iterations a converge trigger waits before firing anyway.
pub const DEFAULT_FALLBACK: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencySpec {
    /// Fire every `R` iterations.
    Rate(u64),
    /// Fire every `max(1, B / |X|)` iterations.
    Budget(u64),
    /// Fire when `t mod 2·t_prev = 0`, `t_prev` being the iteration of the
    /// previous decimation (at least 1).
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trigger {
    /// Fire on quiescence, or after `fallback` iterations without it.
    /// `eps = None` uses the engine tolerance.
    Converge {
        eps: Option<f64>,
        fallback: u64,
    },
    /// Fire once `limit` iterations have passed since the last decimation.
    TimeLimit(u64),
    Frequency(FrequencySpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    All,
    Neighbors,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perform {
    MaxRand,
    MaxEntropy,
    MaxMarginal,
    ThresholdEntropy(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assign {
    MaxMarginal,
    Sample,
}

/// Whether `max_entropy` picks the highest or the lowest marginal entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyOrder {
    #[default]
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecimationPolicy {
    pub trigger: Trigger,
    pub filter: Filter,
    pub perform: Perform,
    pub assign: Assign,
    pub entropy_order: EntropyOrder,
}

impl DecimationPolicy {
    pub fn new(trigger: Trigger, filter: Filter, perform: Perform, assign: Assign) -> Self {
        DecimationPolicy {
            trigger,
            filter,
            perform,
            assign,
            entropy_order: EntropyOrder::Max,
        }
    }

    /// Checks parameter ranges; budgets are checked against `num_variables`.
    pub fn validate(&self, num_variables: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::Policy(msg));
        match self.trigger {
            Trigger::Converge { eps, fallback } => {
                if let Some(e) = eps {
                    if !(e > 0.0 && e.is_finite()) {
                        return bad(format!("converge eps must be > 0, got {e}"));
                    }
                }
                if fallback < 1 {
                    return bad("converge fallback must be >= 1".into());
                }
            }
            Trigger::TimeLimit(l) if l < 1 => return bad("time limit must be >= 1".into()),
            Trigger::Frequency(FrequencySpec::Rate(r)) if r < 1 => {
                return bad("rate must be >= 1".into())
            }
            Trigger::Frequency(FrequencySpec::Budget(b)) if (b as usize) < num_variables => {
                return bad(format!(
                    "budget {b} is below the variable count {num_variables}"
                ))
            }
            _ => {}
        }
        if let Perform::ThresholdEntropy(t) = self.perform {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("threshold must be finite and >= 0, got {t}"));
            }
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(what: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Policy(format!("invalid {what} {s:?}")))
}

fn parse_trigger(v: &str) -> Result<Trigger> {
    let parts: Vec<&str> = v.split(':').collect();
    match parts.as_slice() {
        ["converge"] => Ok(Trigger::Converge {
            eps: None,
            fallback: DEFAULT_FALLBACK,
        }),
        ["converge", eps, rest @ ..] if rest.len() <= 1 => {
            let eps = if eps.trim().is_empty() {
                None
            } else {
                Some(parse_num("eps", eps)?)
            };
            let fallback = match rest.first() {
                Some(f) => parse_num("fallback", f)?,
                None => DEFAULT_FALLBACK,
            };
            Ok(Trigger::Converge { eps, fallback })
        }
        ["time", limit] => Ok(Trigger::TimeLimit(parse_num("limit", limit)?)),
        ["freq", "rate", r] => Ok(Trigger::Frequency(FrequencySpec::Rate(parse_num(
            "rate", r,
        )?))),
        ["freq", "budget", b] => Ok(Trigger::Frequency(FrequencySpec::Budget(parse_num(
            "budget", b,
        )?))),
        ["freq", "decreasing"] => Ok(Trigger::Frequency(FrequencySpec::Decreasing)),
        _ => Err(Error::Policy(format!("unknown trigger {v:?}"))),
    }
}

fn parse_perform(v: &str) -> Result<Perform> {
    match v.split_once(':') {
        None => match v {
            "max_rand" => Ok(Perform::MaxRand),
            "max_entropy" => Ok(Perform::MaxEntropy),
            "max_marginal" => Ok(Perform::MaxMarginal),
            _ => Err(Error::Policy(format!("unknown perform {v:?}"))),
        },
        Some(("threshold_entropy", t)) => Ok(Perform::ThresholdEntropy(parse_num("threshold", t)?)),
        Some(_) => Err(Error::Policy(format!("unknown perform {v:?}"))),
    }
}

impl FromStr for DecimationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (mut trigger, mut filter, mut perform, mut assign, mut order) =
            (None, None, None, None, None);
        for clause in lower.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (key, value) = clause
                .split_once('=')
                .ok_or_else(|| Error::Policy(format!("expected key=value, got {clause:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let dup = || Error::Policy(format!("duplicate key {key:?}"));
            match key {
                "trigger" => {
                    if trigger.replace(parse_trigger(value)?).is_some() {
                        return Err(dup());
                    }
                }
                "filter" => {
                    let f = match value {
                        "all" => Filter::All,
                        "neighbors" => Filter::Neighbors,
                        _ => return Err(Error::Policy(format!("unknown filter {value:?}"))),
                    };
                    if filter.replace(f).is_some() {
                        return Err(dup());
                    }
                }
                "perform" => {
                    if perform.replace(parse_perform(value)?).is_some() {
                        return Err(dup());
                    }
                }
                "assign" => {
                    let a = match value {
                        "max_marginal" => Assign::MaxMarginal,
                        "sample" => Assign::Sample,
                        _ => return Err(Error::Policy(format!("unknown assign {value:?}"))),
                    };
                    if assign.replace(a).is_some() {
                        return Err(dup());
                    }
                }
                "entropy_order" => {
                    let o = match value {
                        "max" => EntropyOrder::Max,
                        "min" => EntropyOrder::Min,
                        _ => return Err(Error::Policy(format!("unknown entropy order {value:?}"))),
                    };
                    if order.replace(o).is_some() {
                        return Err(dup());
                    }
                }
                _ => return Err(Error::Policy(format!("unknown key {key:?}"))),
            }
        }
        let missing = |k: &str| Error::Policy(format!("missing {k}"));
        Ok(DecimationPolicy {
            trigger: trigger.ok_or_else(|| missing("trigger"))?,
            filter: filter.ok_or_else(|| missing("filter"))?,
            perform: perform.ok_or_else(|| missing("perform"))?,
            assign: assign.ok_or_else(|| missing("assign"))?,
            entropy_order: order.unwrap_or_default(),
        })
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Trigger::Converge {
                eps: None,
                fallback: DEFAULT_FALLBACK,
            } => write!(f, "converge"),
            Trigger::Converge {
                eps: None,
                fallback,
            } => write!(f, "converge::{fallback}"),
            Trigger::Converge {
                eps: Some(e),
                fallback,
            } => write!(f, "converge:{e:?}:{fallback}"),
            Trigger::TimeLimit(l) => write!(f, "time:{l}"),
            Trigger::Frequency(FrequencySpec::Rate(r)) => write!(f, "freq:rate:{r}"),
            Trigger::Frequency(FrequencySpec::Budget(b)) => write!(f, "freq:budget:{b}"),
            Trigger::Frequency(FrequencySpec::Decreasing) => write!(f, "freq:decreasing"),
        }
    }
}

impl fmt::Display for DecimationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trigger={};filter=", self.trigger)?;
        f.write_str(match self.filter {
            Filter::All => "all",
            Filter::Neighbors => "neighbors",
        })?;
        f.write_str(";perform=")?;
        match self.perform {
            Perform::MaxRand => f.write_str("max_rand")?,
            Perform::MaxEntropy => f.write_str("max_entropy")?,
            Perform::MaxMarginal => f.write_str("max_marginal")?,
            Perform::ThresholdEntropy(t) => write!(f, "threshold_entropy:{t:?}")?,
        }
        f.write_str(";assign=")?;
        f.write_str(match self.assign {
            Assign::MaxMarginal => "max_marginal",
            Assign::Sample => "sample",
        })?;
        if self.entropy_order == EntropyOrder::Min {
            f.write_str(";entropy_order=min")?;
        }
        Ok(())
    }
}
