//! Probability-weighted ensembles of small graphs and the exhaustive
//! one-step deletion enumeration.
//!
//! An ensemble stands for every network the process can be in at a given
//! time, each with its probability. Expanding it by one deletion event
//! exactly (every node of every member, weighted by its removal
//! probability) gives the ground truth that the state-space kernel must
//! reproduce.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{degree_distribution, deletion_probabilities, DegreeDistribution, DeletionRule, Graph, NodeId};
use crate::kernel::{NodeState, StateDistribution};
use crate::weight::Weight;

pub const DEFAULT_MEMBER_CAP: usize = 1_000_000;

/// Tolerance on the total weight of a float ensemble.
pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Member<W = f64> {
    pub graph: Graph,
    pub weight: W,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphEnsemble<W = f64> {
    members: Vec<Member<W>>,
}

impl<W: Weight> GraphEnsemble<W> {
    /// Validates that weights are positive and sum to one.
    pub fn new(members: Vec<Member<W>>) -> Result<Self> {
        let e = GraphEnsemble { members };
        let sum = e.total_weight();
        if e.members.is_empty()
            || e.members.iter().any(|m| m.weight <= W::zero())
            || !sum.close_to(&W::one(), WEIGHT_TOL)
        {
            return Err(Error::EnsembleNotNormalized { sum: sum.render() });
        }
        Ok(e)
    }

    pub fn singleton(graph: Graph) -> Self {
        GraphEnsemble {
            members: vec![Member {
                graph,
                weight: W::one(),
            }],
        }
    }

    pub fn members(&self) -> &[Member<W>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_weight(&self) -> W {
        self.members.iter().fold(W::zero(), |acc, m| acc + m.weight.clone())
    }

    /// Largest member size.
    pub fn max_size(&self) -> usize {
        self.members.iter().map(|m| m.graph.node_count()).max().unwrap_or(0)
    }

    /// Iterates `(graph, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&Graph, &W)> {
        self.members.iter().map(|m| (&m.graph, &m.weight))
    }
}

/// Knobs for [`enumerate_deletion_step_with`].
#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    /// Merged member count above which enumeration fails.
    pub cap: usize,
    /// Members at or below this size are left unchanged (reflecting
    /// boundary).
    pub n_floor: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            cap: DEFAULT_MEMBER_CAP,
            n_floor: 1,
        }
    }
}

/// One possible result of deleting a single node.
#[derive(Debug, Clone, PartialEq)]
pub struct DeletionOutcome<W = f64> {
    pub deleted: NodeId,
    pub probability: W,
    pub graph: Graph,
}

/// All single-node deletions of `g`, in node order, including those with
/// zero probability.
pub fn deletion_outcomes<W: Weight>(g: &Graph, rule: DeletionRule) -> Result<Vec<DeletionOutcome<W>>> {
    let q = deletion_probabilities::<W>(g, rule);
    q.probs
        .into_iter()
        .map(|(v, p)| {
            Ok(DeletionOutcome {
                deleted: v,
                probability: p,
                graph: g.delete_node(v)?,
            })
        })
        .collect()
}

pub fn enumerate_deletion_step<W: Weight>(e: &GraphEnsemble<W>, rule: DeletionRule) -> Result<GraphEnsemble<W>> {
    enumerate_deletion_step_with(e, rule, EnumerationOptions::default())
}

/// Expands every member by every possible deletion and merges outcomes
/// with identical labels and edges. Members appear in order of first
/// occurrence, so the result does not depend on the thread count.
pub fn enumerate_deletion_step_with<W: Weight>(
    e: &GraphEnsemble<W>,
    rule: DeletionRule,
    opts: EnumerationOptions,
) -> Result<GraphEnsemble<W>> {
    let expanded: Vec<Vec<(Graph, W)>> = e
        .members
        .par_iter()
        .map(|m| -> Result<Vec<(Graph, W)>> {
            if m.graph.node_count() <= opts.n_floor.max(1) {
                return Ok(vec![(m.graph.clone(), m.weight.clone())]);
            }
            Ok(deletion_outcomes::<W>(&m.graph, rule)?
                .into_iter()
                .filter(|o| !o.probability.is_zero())
                .map(|o| (o.graph, m.weight.clone() * o.probability))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut index: BTreeMap<Graph, usize> = BTreeMap::new();
    let mut members: Vec<Member<W>> = Vec::new();
    for (graph, weight) in expanded.into_iter().flatten() {
        match index.get(&graph) {
            Some(&i) => {
                let m = &mut members[i];
                m.weight = m.weight.clone() + weight;
            }
            None => {
                if members.len() == opts.cap {
                    return Err(Error::EnumerationCap {
                        produced: members.len() + 1,
                        cap: opts.cap,
                    });
                }
                index.insert(graph.clone(), members.len());
                members.push(Member { graph, weight });
            }
        }
    }
    Ok(GraphEnsemble { members })
}

/// Weighted mixture of member degree distributions, over degrees
/// `0..max_size`.
pub fn average_degree_distribution<W: Weight>(e: &GraphEnsemble<W>) -> DegreeDistribution<W> {
    let len = e.max_size();
    let mut acc = vec![W::zero(); len];
    for (g, w) in e.iter() {
        let dd = degree_distribution::<W>(g);
        for (k, p) in dd.probs().iter().enumerate() {
            acc[k] = acc[k].clone() + w.clone() * p.clone();
        }
    }
    DegreeDistribution::from_probs(acc)
}

/// Node-state mass: each member spreads its weight over `(n, k)` in
/// proportion to its degree census.
pub fn state_distribution_of<W: Weight>(e: &GraphEnsemble<W>) -> StateDistribution<W> {
    let mut mass: BTreeMap<NodeState, W> = BTreeMap::new();
    for (g, w) in e.iter() {
        let n = g.node_count();
        for (k, count) in g.degree_census().into_iter().enumerate() {
            if count == 0 {
                continue;
            }
            let entry = mass.entry(NodeState::new_unchecked(n, k)).or_insert_with(W::zero);
            *entry = entry.clone() + w.clone() * W::from_ratio(count as u64, n as u64);
        }
    }
    StateDistribution::from_map_unchecked(mass, 0)
}

#[derive(Debug, Serialize, Deserialize)]
struct EnsembleDoc {
    mode: String,
    members: Vec<MemberDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MemberDoc {
    weight: String,
    nodes: Vec<u64>,
    edges: Vec<(u64, u64)>,
}

impl<W: Weight> GraphEnsemble<W> {
    /// JSON document listing `{weight, nodes, edges}` per member. Weights are
    /// exact fractions in exact mode and decimals otherwise.
    pub fn to_json(&self) -> String {
        let doc = EnsembleDoc {
            mode: if W::EXACT { "exact" } else { "float" }.to_string(),
            members: self
                .members
                .iter()
                .map(|m| MemberDoc {
                    weight: m.weight.render(),
                    nodes: m.graph.nodes().map(|v| v.0).collect(),
                    edges: m.graph.edges().map(|(u, v)| (u.0, v.0)).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("ensemble document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: EnsembleDoc = serde_json::from_str(text)?;
        let members = doc
            .members
            .into_iter()
            .map(|m| {
                Ok(Member {
                    weight: W::parse_weight(&m.weight)?,
                    graph: Graph::new(m.nodes.into_iter().map(NodeId), m.edges)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GraphEnsemble::new(members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::reference_four_node_graph;
    use crate::weight::Exact;

    fn q(n: u64, d: u64) -> Exact {
        Exact::from_ratio(n, d)
    }

    #[test]
    fn reference_graph_outcome_weights() {
        let e = GraphEnsemble::<Exact>::singleton(reference_four_node_graph());
        let next = enumerate_deletion_step(&e, DeletionRule::DegreeProportional).unwrap();
        let weights: Vec<_> = next.members().iter().map(|m| m.weight.clone()).collect();
        assert_eq!(weights, vec![q(1, 8), q(3, 8), q(2, 8), q(2, 8)]);
        assert_eq!(next.total_weight(), q(1, 1));
    }

    #[test]
    fn reference_graph_average_degree_distribution() {
        let e = GraphEnsemble::<Exact>::singleton(reference_four_node_graph());
        let next = enumerate_deletion_step(&e, DeletionRule::DegreeProportional).unwrap();
        let avg = average_degree_distribution(&next);
        assert_eq!(avg.padded(4).probs(), &[q(1, 8), q(14, 24), q(7, 24), q(0, 1)]);
    }

    #[test]
    fn triangle_uniform_keeps_distinct_labels() {
        let e = GraphEnsemble::<Exact>::singleton(Graph::complete(3));
        let next = enumerate_deletion_step(&e, DeletionRule::Uniform).unwrap();
        // label-exact merge: three K2s on different label pairs
        assert_eq!(next.len(), 3);
        assert!(next.members().iter().all(|m| m.weight == q(1, 3)));
        let avg = average_degree_distribution(&next);
        assert_eq!(avg.probs(), &[q(0, 1), q(1, 1)]);
    }

    #[test]
    fn path_degree_proportional() {
        let e = GraphEnsemble::<Exact>::singleton(Graph::path(3));
        let next = enumerate_deletion_step(&e, DeletionRule::DegreeProportional).unwrap();
        let got: Vec<_> = next
            .members()
            .iter()
            .map(|m| (m.graph.edge_count(), m.weight.clone()))
            .collect();
        assert_eq!(got, vec![(1, q(1, 4)), (0, q(1, 2)), (1, q(1, 4))]);
        let avg = average_degree_distribution(&next);
        assert_eq!(avg.padded(3).probs(), &[q(1, 2), q(1, 2), q(0, 1)]);
    }

    #[test]
    fn identical_outcomes_merge() {
        // two copies of K3 at weight 1/2 each: the six outcomes collapse to
        // the three labelled edges, each at 1/3
        let e = GraphEnsemble::<Exact>::new(vec![
            Member {
                graph: Graph::complete(3),
                weight: q(1, 2),
            },
            Member {
                graph: Graph::from_edges([(1, 2), (2, 3), (1, 3)]).unwrap(),
                weight: q(1, 2),
            },
        ])
        .unwrap();
        let next = enumerate_deletion_step(&e, DeletionRule::Uniform).unwrap();
        assert_eq!(next.len(), 3);
        assert!(next.members().iter().all(|m| m.weight == q(1, 3)));
        assert!(next.members().iter().any(|m| m.graph == Graph::complete(2)));
    }

    #[test]
    fn zero_probability_outcomes_dropped() {
        let g = Graph::new([1u64, 2, 3], [(1, 2)]).unwrap();
        let e = GraphEnsemble::<Exact>::singleton(g);
        let next = enumerate_deletion_step(&e, DeletionRule::DegreeProportional).unwrap();
        assert_eq!(next.len(), 2);
    }

    #[test]
    fn cap_is_an_error() {
        let e = GraphEnsemble::<f64>::singleton(Graph::path(5));
        let opts = EnumerationOptions { cap: 2, n_floor: 1 };
        assert!(matches!(
            enumerate_deletion_step_with(&e, DeletionRule::Uniform, opts),
            Err(Error::EnumerationCap { cap: 2, .. })
        ));
    }

    #[test]
    fn floor_members_stay() {
        let e = GraphEnsemble::<Exact>::singleton(Graph::complete(2));
        let opts = EnumerationOptions { cap: 10, n_floor: 2 };
        let next = enumerate_deletion_step_with(&e, DeletionRule::Uniform, opts).unwrap();
        assert_eq!(next, e);
    }

    #[test]
    fn state_distribution_examples() {
        let sd = state_distribution_of(&GraphEnsemble::<Exact>::singleton(reference_four_node_graph()));
        assert_eq!(sd.get(NodeState::new(4, 1).unwrap()), q(1, 4));
        assert_eq!(sd.get(NodeState::new(4, 2).unwrap()), q(1, 2));
        assert_eq!(sd.get(NodeState::new(4, 3).unwrap()), q(1, 4));

        let e = GraphEnsemble::<Exact>::new(vec![
            Member {
                graph: Graph::complete(3),
                weight: q(1, 2),
            },
            Member {
                graph: Graph::empty(2),
                weight: q(1, 2),
            },
        ])
        .unwrap();
        let sd = state_distribution_of(&e);
        assert_eq!(sd.len(), 2);
        assert_eq!(sd.get(NodeState::new(3, 2).unwrap()), q(1, 2));
        assert_eq!(sd.get(NodeState::new(2, 0).unwrap()), q(1, 2));
    }

    #[test]
    fn rejects_unnormalized() {
        let r = GraphEnsemble::<Exact>::new(vec![Member {
            graph: Graph::complete(3),
            weight: q(1, 2),
        }]);
        assert!(r.is_err());
        let r = GraphEnsemble::<f64>::new(vec![
            Member {
                graph: Graph::complete(3),
                weight: 1.5,
            },
            Member {
                graph: Graph::complete(2),
                weight: -0.5,
            },
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn json_round_trip() {
        let e = GraphEnsemble::<Exact>::singleton(reference_four_node_graph());
        let next = enumerate_deletion_step(&e, DeletionRule::DegreeProportional).unwrap();
        let text = next.to_json();
        assert!(text.contains("\"3/8\""));
        assert_eq!(GraphEnsemble::<Exact>::from_json(&text).unwrap(), next);
    }
}
