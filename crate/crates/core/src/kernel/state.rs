use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DegreeDistribution;
use crate::weight::Weight;

/// Size of the network a node lives in, and the node's degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeState {
    pub n: usize,
    pub k: usize,
}

impl NodeState {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k >= n {
            return Err(Error::InvalidState { n, k });
        }
        Ok(NodeState { n, k })
    }

    pub(crate) fn new_unchecked(n: usize, k: usize) -> Self {
        debug_assert!(k < n);
        NodeState { n, k }
    }
}

impl fmt::Display for NodeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.k)
    }
}

/// Probability mass over node states at step `t`.
///
/// Stored per network size as a dense vector over degrees `0..n`; the mass
/// at size `n` is the probability that the process is at a network of `n`
/// nodes, split by the fraction of its nodes having each degree.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution<W = f64> {
    levels: BTreeMap<usize, Vec<W>>,
    pub t: u64,
}

/// Tolerance for the unit-mass invariant in float mode.
pub const MASS_TOL: f64 = 1e-12;

impl<W: Weight> StateDistribution<W> {
    /// Validates that the mass is non-negative, sums to one and has no
    /// entry with `k >= n`.
    pub fn from_map(mass: BTreeMap<NodeState, W>, t: u64) -> Result<Self> {
        for s in mass.keys() {
            NodeState::new(s.n, s.k)?;
        }
        let sd = Self::from_map_unchecked(mass, t);
        sd.validate()?;
        Ok(sd)
    }

    pub(crate) fn from_map_unchecked(mass: BTreeMap<NodeState, W>, t: u64) -> Self {
        let mut levels: BTreeMap<usize, Vec<W>> = BTreeMap::new();
        for (s, w) in mass {
            let level = levels.entry(s.n).or_insert_with(|| vec![W::zero(); s.n]);
            level[s.k] = level[s.k].clone() + w;
        }
        StateDistribution { levels, t }
    }

    pub(crate) fn from_levels(levels: BTreeMap<usize, Vec<W>>, t: u64) -> Self {
        debug_assert!(levels.iter().all(|(n, v)| v.len() == *n));
        StateDistribution { levels, t }
    }

    /// All mass on one state.
    pub fn point(s: NodeState) -> Self {
        let mut level = vec![W::zero(); s.n];
        level[s.k] = W::one();
        StateDistribution {
            levels: BTreeMap::from([(s.n, level)]),
            t: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sum = self.total();
        let negative = self.levels.values().flatten().any(Weight::is_negative_weight);
        if negative || !sum.close_to(&W::one(), MASS_TOL) {
            return Err(Error::StateNotNormalized { sum: sum.render() });
        }
        Ok(())
    }

    pub fn get(&self, s: NodeState) -> W {
        self.levels
            .get(&s.n)
            .and_then(|l| l.get(s.k))
            .cloned()
            .unwrap_or_else(W::zero)
    }

    /// Non-zero entries in `(n, k)` order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeState, &W)> {
        self.levels.iter().flat_map(|(&n, level)| {
            level
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(move |(k, w)| (NodeState::new_unchecked(n, k), w))
        })
    }

    /// Number of non-zero entries.
    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> W {
        self.levels.values().flatten().cloned().fold(W::zero(), |a, b| a + b)
    }

    /// Sizes carrying non-zero mass.
    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels
            .iter()
            .filter(|(_, l)| l.iter().any(|w| !w.is_zero()))
            .map(|(&n, _)| n)
    }

    pub fn min_size(&self) -> Option<usize> {
        self.sizes().next()
    }

    pub fn max_size(&self) -> Option<usize> {
        self.sizes().last()
    }

    /// Joint mass at size `n`, indexed by degree.
    pub fn level(&self, n: usize) -> Option<&[W]> {
        self.levels.get(&n).map(Vec::as_slice)
    }

    pub(crate) fn levels(&self) -> &BTreeMap<usize, Vec<W>> {
        &self.levels
    }

    pub fn size_mass(&self, n: usize) -> W {
        self.level(n)
            .map(|l| l.iter().cloned().fold(W::zero(), |a, b| a + b))
            .unwrap_or_else(W::zero)
    }

    /// Degree distribution conditional on network size `n`, or `None` when
    /// size `n` carries no mass.
    pub fn conditional(&self, n: usize) -> Option<Vec<W>> {
        let level = self.level(n)?;
        let mass = level.iter().cloned().fold(W::zero(), |a, b| a + b);
        if mass.is_zero() {
            return None;
        }
        Some(level.iter().map(|w| w.clone() / mass.clone()).collect())
    }

    /// `P_k = sum_n P_(n,k)`, over degrees `0..max_size`.
    pub fn degree_marginal(&self) -> DegreeDistribution<W> {
        let len = self.levels.keys().next_back().copied().unwrap_or(0);
        let mut probs = vec![W::zero(); len];
        for level in self.levels.values() {
            for (k, w) in level.iter().enumerate() {
                probs[k] = probs[k].clone() + w.clone();
            }
        }
        DegreeDistribution::from_probs(probs)
    }

    /// Marginal over network sizes, indexed by `n` (entry 0 unused).
    pub fn size_marginal(&self) -> Vec<W> {
        let len = self.levels.keys().next_back().copied().unwrap_or(0) + 1;
        let mut out = vec![W::zero(); len];
        for &n in self.levels.keys() {
            out[n] = self.size_mass(n);
        }
        out
    }

    /// Tabular text: a header line, then one `n k mass` triple per non-zero
    /// state.
    pub fn to_table(&self) -> String {
        let mut out = format!("# t={}\nn k mass\n", self.t);
        for (s, w) in self.iter() {
            out.push_str(&format!("{} {} {}\n", s.n, s.k, w.render()));
        }
        out
    }

    pub fn parse_table(text: &str) -> Result<Self> {
        let mut mass = BTreeMap::new();
        let mut t = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix("# t=") {
                t = rest.trim().parse().map_err(|_| Error::EdgeList {
                    line: i + 1,
                    message: format!("bad step index {rest:?}"),
                })?;
                continue;
            }
            if line.is_empty() || line.starts_with('#') || line == "n k mass" {
                continue;
            }
            let bad = || Error::EdgeList {
                line: i + 1,
                message: format!("expected \"n k mass\", got {line:?}"),
            };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [n, k, w] = parts.as_slice() else {
                return Err(bad());
            };
            let n: usize = n.parse().map_err(|_| bad())?;
            let k: usize = k.parse().map_err(|_| bad())?;
            let w = W::parse_weight(w)?;
            let s = NodeState::new(n, k)?;
            let entry = mass.entry(s).or_insert_with(W::zero);
            *entry = entry.clone() + w;
        }
        Self::from_map(mass, t)
    }

    pub fn to_f64(&self) -> StateDistribution<f64> {
        StateDistribution {
            levels: self
                .levels
                .iter()
                .map(|(&n, l)| (n, l.iter().map(Weight::to_f64).collect()))
                .collect(),
            t: self.t,
        }
    }
}
