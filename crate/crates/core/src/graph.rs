//! Small undirected simple graphs, their degree statistics and per-node
//! deletion probabilities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::Weight;

/// Opaque node identifier. Only degrees carry meaning; labels exist so that
/// ensembles can tell members apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for NodeId {
    fn from(v: u64) -> Self {
        NodeId(v)
    }
}

/// Undirected simple graph with at least one node.
///
/// Stored as ordered adjacency sets, so equality, ordering and iteration
/// are deterministic and label-exact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl Graph {
    /// Builds a graph from explicit nodes plus an edge list. Endpoints of
    /// edges are added as nodes if missing.
    pub fn new<N, E>(nodes: N, edges: E) -> Result<Self>
    where
        N: IntoIterator,
        N::Item: Into<NodeId>,
        E: IntoIterator<Item = (u64, u64)>,
    {
        let mut adjacency: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for v in nodes {
            adjacency.entry(v.into()).or_default();
        }
        for (u, v) in edges {
            let (u, v) = (NodeId(u), NodeId(v));
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !adjacency.entry(u).or_default().insert(v) {
                return Err(Error::DuplicateEdge(u, v));
            }
            adjacency.entry(v).or_default().insert(u);
        }
        if adjacency.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(Graph { adjacency })
    }

    pub fn from_edges(edges: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        Self::new(std::iter::empty::<NodeId>(), edges)
    }

    /// Complete graph on nodes `1..=n`.
    pub fn complete(n: usize) -> Self {
        let n = n.max(1) as u64;
        let edges = (1..=n).flat_map(|u| ((u + 1)..=n).map(move |v| (u, v)));
        Self::new(1..=n, edges).expect("complete graph is simple")
    }

    /// `n` isolated nodes labelled `1..=n`.
    pub fn empty(n: usize) -> Self {
        Self::new(1..=(n.max(1) as u64), std::iter::empty()).expect("non-empty")
    }

    /// Path `1 - 2 - ... - n`.
    pub fn path(n: usize) -> Self {
        let n = n.max(1) as u64;
        Self::new(1..=n, (1..n).map(|u| (u, u + 1))).expect("path is simple")
    }

    /// Star with hub `1` and leaves `2..=n`.
    pub fn star(n: usize) -> Self {
        let n = n.max(1) as u64;
        Self::new(1..=n, (2..=n).map(|v| (1, v))).expect("star is simple")
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.degree_sum() / 2
    }

    pub fn degree_sum(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn degree(&self, v: NodeId) -> Option<usize> {
        self.adjacency.get(&v).map(BTreeSet::len)
    }

    pub fn neighbors(&self, v: NodeId) -> Option<&BTreeSet<NodeId>> {
        self.adjacency.get(&v)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency.get(&u).is_some_and(|n| n.contains(&v))
    }

    /// Each edge once, as `(smaller, larger)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&u, ns)| ns.range(u..).map(move |&v| (u, v)))
    }

    /// Degrees in node order.
    pub fn degrees(&self) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        self.adjacency.iter().map(|(&v, ns)| (v, ns.len()))
    }

    /// `census[k]` = number of nodes of degree `k`, length `n`.
    pub fn degree_census(&self) -> Vec<usize> {
        let mut census = vec![0; self.node_count()];
        for (_, k) in self.degrees() {
            census[k] += 1;
        }
        census
    }

    pub fn max_label(&self) -> NodeId {
        *self.adjacency.keys().next_back().expect("graph is non-empty")
    }

    /// Copy of the graph without `v` and its incident edges.
    pub fn delete_node(&self, v: NodeId) -> Result<Graph> {
        if !self.contains(v) {
            return Err(Error::UnknownNode(v));
        }
        if self.node_count() == 1 {
            return Err(Error::EmptyGraph);
        }
        let mut g = self.clone();
        g.remove_node_in_place(v);
        Ok(g)
    }

    pub(crate) fn remove_node_in_place(&mut self, v: NodeId) {
        if let Some(ns) = self.adjacency.remove(&v) {
            for u in ns {
                if let Some(set) = self.adjacency.get_mut(&u) {
                    set.remove(&v);
                }
            }
        }
    }

    pub(crate) fn insert_node(&mut self, v: NodeId) {
        self.adjacency.entry(v).or_default();
    }

    pub(crate) fn insert_edge(&mut self, u: NodeId, v: NodeId) {
        debug_assert!(u != v);
        self.adjacency.entry(u).or_default().insert(v);
        self.adjacency.entry(v).or_default().insert(u);
    }

    /// Writes the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (v, k) in self.degrees() {
            if k == 0 {
                out.push_str(&format!("node {v}\n"));
            }
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the edge-list text format: one `u v` edge per line,
    /// `node u` for isolated nodes, `#` comments and blank lines ignored.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut adjacency: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let label = |s: &str| -> Result<NodeId> {
                s.parse::<u64>().map(NodeId).map_err(|_| Error::EdgeList {
                    line,
                    message: format!("node label {s:?} is not a non-negative integer"),
                })
            };
            match tokens.as_slice() {
                ["node", v] => {
                    adjacency.entry(label(v)?).or_default();
                }
                [u, v] => {
                    let (u, v) = (label(u)?, label(v)?);
                    if u == v {
                        return Err(Error::EdgeList {
                            line,
                            message: format!("self-loop on node {u}"),
                        });
                    }
                    if !adjacency.entry(u).or_default().insert(v) {
                        return Err(Error::EdgeList {
                            line,
                            message: format!("duplicate edge {u}-{v}"),
                        });
                    }
                    adjacency.entry(v).or_default().insert(u);
                }
                _ => {
                    return Err(Error::EdgeList {
                        line,
                        message: format!("expected \"u v\" or \"node u\", got {content:?}"),
                    })
                }
            }
        }
        if adjacency.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(Graph { adjacency })
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Graph::parse_edge_list(s)
    }
}

/// Probability vector over degrees `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution<W = f64> {
    probs: Vec<W>,
}

impl<W: Weight> DegreeDistribution<W> {
    pub fn from_probs(probs: Vec<W>) -> Self {
        DegreeDistribution { probs }
    }

    /// Normalizes a census of node counts per degree.
    pub fn from_census(census: &[usize]) -> Self {
        let total: usize = census.iter().sum();
        let probs = census
            .iter()
            .map(|&c| W::from_ratio(c as u64, total.max(1) as u64))
            .collect();
        DegreeDistribution { probs }
    }

    pub fn probs(&self) -> &[W] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<W> {
        self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of degree `k`, zero beyond the stored range.
    pub fn get(&self, k: usize) -> W {
        self.probs.get(k).cloned().unwrap_or_else(W::zero)
    }

    pub fn total(&self) -> W {
        self.probs.iter().cloned().fold(W::zero(), |a, b| a + b)
    }

    /// Zero-extended to at least `len` entries.
    pub fn padded(&self, len: usize) -> Self {
        let mut probs = self.probs.clone();
        while probs.len() < len {
            probs.push(W::zero());
        }
        DegreeDistribution { probs }
    }

    /// Trailing zeros removed (at least one entry kept).
    pub fn trimmed(&self) -> Self {
        let mut probs = self.probs.clone();
        while probs.len() > 1 && probs.last().is_some_and(|p| p.is_zero()) {
            probs.pop();
        }
        DegreeDistribution { probs }
    }

    /// Padding-insensitive comparison.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let len = self.len().max(other.len());
        (0..len)
            .map(|k| (self.get(k).to_f64() - other.get(k).to_f64()).abs())
            .fold(0.0, f64::max)
    }

    /// Padding-insensitive exact equality (tolerance ignored in exact mode).
    pub fn agrees_with(&self, other: &Self, tol: f64) -> bool {
        let len = self.len().max(other.len());
        (0..len).all(|k| self.get(k).close_to(&other.get(k), tol))
    }

    /// Half the L1 distance.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let len = self.len().max(other.len());
        0.5 * (0..len)
            .map(|k| (self.get(k).to_f64() - other.get(k).to_f64()).abs())
            .sum::<f64>()
    }

    pub fn to_f64(&self) -> DegreeDistribution<f64> {
        DegreeDistribution {
            probs: self.probs.iter().map(Weight::to_f64).collect(),
        }
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        self.probs.iter().all(|p| !p.is_negative_weight()) && self.total().close_to(&W::one(), tol)
    }
}

/// Degree distribution of a single graph: `probs[k] = N_k / n`, over
/// degrees `0..n`.
pub fn degree_distribution<W: Weight>(g: &Graph) -> DegreeDistribution<W> {
    DegreeDistribution::from_census(&g.degree_census())
}

/// Which node is removed when the network shrinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeletionRule {
    /// Every node with probability `1/n`.
    Uniform,
    /// Node `v` with probability `k_v / sum_w k_w`.
    #[serde(alias = "preferential")]
    DegreeProportional,
}

impl fmt::Display for DeletionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeletionRule::Uniform => f.write_str("uniform"),
            DeletionRule::DegreeProportional => f.write_str("degree-proportional"),
        }
    }
}

impl FromStr for DeletionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" | "random" => Ok(DeletionRule::Uniform),
            "degree-proportional" | "degree_proportional" | "preferential" => Ok(DeletionRule::DegreeProportional),
            other => Err(Error::invalid(
                "delete",
                format!("{other:?} is not one of uniform, degree-proportional"),
            )),
        }
    }
}

/// Per-node removal probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DeletionProbabilities<W = f64> {
    pub probs: BTreeMap<NodeId, W>,
    /// Set when degree-proportional deletion met an edgeless graph and the
    /// uniform rule was used instead.
    pub fallback: bool,
}

impl<W: Weight> DeletionProbabilities<W> {
    pub fn get(&self, v: NodeId) -> W {
        self.probs.get(&v).cloned().unwrap_or_else(W::zero)
    }

    pub fn total(&self) -> W {
        self.probs.values().cloned().fold(W::zero(), |a, b| a + b)
    }
}

pub fn deletion_probabilities<W: Weight>(g: &Graph, rule: DeletionRule) -> DeletionProbabilities<W> {
    let n = g.node_count() as u64;
    let degree_sum = g.degree_sum() as u64;
    let uniform = |g: &Graph| g.nodes().map(|v| (v, W::from_ratio(1, n))).collect();
    match rule {
        DeletionRule::Uniform => DeletionProbabilities {
            probs: uniform(g),
            fallback: false,
        },
        DeletionRule::DegreeProportional if degree_sum == 0 => DeletionProbabilities {
            probs: uniform(g),
            fallback: true,
        },
        DeletionRule::DegreeProportional => DeletionProbabilities {
            probs: g
                .degrees()
                .map(|(v, k)| (v, W::from_ratio(k as u64, degree_sum)))
                .collect(),
            fallback: false,
        },
    }
}

pub fn delete_node(g: &Graph, v: NodeId) -> Result<Graph> {
    g.delete_node(v)
}

/// Four-node graph with edges `1-2, 2-3, 2-4, 3-4`: degrees `(1, 3, 2, 2)`
/// and degree-proportional removal probabilities `(1/8, 3/8, 2/8, 2/8)`.
pub fn reference_four_node_graph() -> Graph {
    Graph::from_edges([(1, 2), (2, 3), (2, 4), (3, 4)]).expect("reference graph is simple")
}
