use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DeletionRule;
use crate::weight::Weight;

/// How a newcomer picks its `m` neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttachRule {
    /// `m` distinct targets, uniformly at random.
    #[serde(alias = "uniform-attach")]
    Uniform,
    /// `m` distinct targets, each drawn with probability proportional to
    /// degree among the remaining candidates.
    #[serde(alias = "preferential-attach")]
    Preferential,
}

impl fmt::Display for AttachRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttachRule::Uniform => f.write_str("uniform"),
            AttachRule::Preferential => f.write_str("preferential"),
        }
    }
}

impl FromStr for AttachRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" | "random" | "uniform-attach" => Ok(AttachRule::Uniform),
            "preferential" | "preferential-attach" => Ok(AttachRule::Preferential),
            other => Err(Error::invalid(
                "attach",
                format!("{other:?} is not one of uniform, preferential"),
            )),
        }
    }
}

/// Birth-death rule: with probability `p` a node joins with `m` edges,
/// otherwise one node is removed according to `delete`.
///
/// Sizes are confined to `[n_floor, n_cap]`. A deletion at `n_floor` and a
/// growth at `n_cap` leave the network unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRule<W = f64> {
    pub p: W,
    pub m: usize,
    pub attach: AttachRule,
    pub delete: DeletionRule,
    pub n_floor: usize,
    pub n_cap: usize,
}

impl<W: Weight> EvolutionRule<W> {
    pub fn new(p: W, m: usize, attach: AttachRule, delete: DeletionRule, n_floor: usize, n_cap: usize) -> Result<Self> {
        let rule = EvolutionRule {
            p,
            m,
            attach,
            delete,
            n_floor,
            n_cap,
        };
        rule.validate()?;
        Ok(rule)
    }

    /// Pure deletion, no size cap beyond the starting size.
    pub fn pure_decay(delete: DeletionRule, n_floor: usize, n_cap: usize) -> Self {
        EvolutionRule {
            p: W::zero(),
            m: 0,
            attach: AttachRule::Uniform,
            delete,
            n_floor,
            n_cap,
        }
    }

    pub fn q(&self) -> W {
        W::one() - self.p.clone()
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < W::zero() || self.p > W::one() {
            return Err(Error::invalid(
                "p",
                format!("growth probability {} is outside [0, 1]", self.p.render()),
            ));
        }
        if self.n_floor < 2 {
            return Err(Error::invalid(
                "n_floor",
                format!("minimal size {} is below 2", self.n_floor),
            ));
        }
        if self.m > self.n_floor {
            return Err(Error::invalid(
                "m",
                format!(
                    "attachment count {} exceeds the minimal network size n_floor = {}",
                    self.m, self.n_floor
                ),
            ));
        }
        if self.n_cap < self.n_floor {
            return Err(Error::invalid(
                "n_cap",
                format!("size cap {} is below n_floor = {}", self.n_cap, self.n_floor),
            ));
        }
        Ok(())
    }
}
