//! Monte Carlo simulation of single network trajectories.
//!
//! Each trial evolves one concrete graph: at every step a node joins with
//! probability `p`, otherwise one node is removed. Trials draw from
//! independent ChaCha streams keyed by `(seed, trial_index)`, and results
//! are reduced in trial order, so output is bit-identical for any number of
//! worker threads.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DegreeDistribution, DeletionRule, Graph, NodeId};
use crate::kernel::{AttachRule, EvolutionRule};

/// Largest network for which full snapshots may be recorded.
pub const SNAPSHOT_MAX_NODES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub rule: EvolutionRule<f64>,
    pub t_max: usize,
    pub trials: usize,
    pub seed: u64,
    /// Steps discarded before sampling. Snapshots are taken at
    /// `t = burn_in + 1 ..= t_max`, or at `t = 0` alone when `t_max = 0`.
    pub burn_in: usize,
    /// Starting graph; the complete graph on `n_floor` nodes when `None`.
    pub initial: Option<Graph>,
    /// Record every intermediate graph (only for `n_cap <= 20`).
    pub snapshots: bool,
}

impl SimConfig {
    /// Config with `burn_in = t_max / 2` and the complete-graph start.
    pub fn new(rule: EvolutionRule<f64>, t_max: usize, trials: usize, seed: u64) -> Self {
        SimConfig {
            rule,
            t_max,
            trials,
            seed,
            burn_in: t_max / 2,
            initial: None,
            snapshots: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.rule.validate()?;
        if self.trials == 0 {
            return Err(Error::invalid("trials", "at least one trial is required"));
        }
        if self.t_max > 0 && self.burn_in >= self.t_max {
            return Err(Error::invalid(
                "burn_in",
                format!("burn-in {} must be below t_max = {}", self.burn_in, self.t_max),
            ));
        }
        if self.t_max == 0 && self.burn_in != 0 {
            return Err(Error::invalid("burn_in", "burn-in must be 0 when t_max = 0"));
        }
        let n0 = self.start_graph().node_count();
        if n0 < self.rule.n_floor || n0 > self.rule.n_cap {
            return Err(Error::invalid(
                "initial",
                format!(
                    "initial graph has {n0} nodes, outside [{}, {}]",
                    self.rule.n_floor, self.rule.n_cap
                ),
            ));
        }
        if self.snapshots && self.rule.n_cap > SNAPSHOT_MAX_NODES {
            return Err(Error::invalid(
                "snapshots",
                format!("snapshots need n_cap <= {SNAPSHOT_MAX_NODES}"),
            ));
        }
        Ok(())
    }

    pub fn start_graph(&self) -> Graph {
        self.initial
            .clone()
            .unwrap_or_else(|| Graph::complete(self.rule.n_floor))
    }

    fn sample_times(&self) -> std::ops::RangeInclusive<usize> {
        if self.t_max == 0 {
            0..=0
        } else {
            (self.burn_in + 1)..=self.t_max
        }
    }

    /// Number of post-burn-in snapshots per trial.
    pub fn samples_per_trial(&self) -> usize {
        self.sample_times().count()
    }
}

/// What happened in one step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Event {
    Grow {
        node: NodeId,
        targets: Vec<NodeId>,
    },
    Delete {
        node: NodeId,
    },
    /// Growth drawn at `n_cap`; nothing changed.
    GrowthBlocked,
    /// Deletion drawn at `n_floor`; nothing changed.
    DeletionHeld,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `events[t]` took the graph from time `t` to `t + 1`.
    pub events: Vec<Event>,
    /// Degree census at `t = 0 ..= t_max`.
    pub censuses: Vec<Vec<usize>>,
    /// Graph at every time, when snapshots are enabled.
    pub snapshots: Option<Vec<Graph>>,
    pub final_graph: Graph,
}

/// RNG stream for one trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

struct Walker {
    graph: Graph,
    next_label: u64,
    rng: ChaCha8Rng,
}

impl Walker {
    fn new(cfg: &SimConfig, trial_index: u64) -> Self {
        let graph = cfg.start_graph();
        let next_label = graph.max_label().0 + 1;
        Walker {
            graph,
            next_label,
            rng: trial_rng(cfg.seed, trial_index),
        }
    }

    fn step(&mut self, rule: &EvolutionRule<f64>) -> Event {
        let grow = self.rng.gen::<f64>() < rule.p;
        let n = self.graph.node_count();
        if grow {
            if n >= rule.n_cap {
                return Event::GrowthBlocked;
            }
            let targets = self.pick_targets(rule.m, rule.attach);
            let node = NodeId(self.next_label);
            self.next_label += 1;
            self.graph.insert_node(node);
            for &t in &targets {
                self.graph.insert_edge(node, t);
            }
            Event::Grow { node, targets }
        } else {
            if n <= rule.n_floor {
                return Event::DeletionHeld;
            }
            let node = self.pick_victim(rule.delete);
            self.graph.remove_node_in_place(node);
            Event::Delete { node }
        }
    }

    fn pick_targets(&mut self, m: usize, attach: AttachRule) -> Vec<NodeId> {
        let nodes: Vec<(NodeId, usize)> = self.graph.degrees().collect();
        match attach {
            AttachRule::Uniform => {
                let mut picked: Vec<NodeId> = index::sample(&mut self.rng, nodes.len(), m)
                    .into_iter()
                    .map(|i| nodes[i].0)
                    .collect();
                picked.sort();
                picked
            }
            AttachRule::Preferential => {
                let mut pool = nodes;
                let mut picked = Vec::with_capacity(m);
                for _ in 0..m {
                    let i = weighted_index(&mut self.rng, &pool);
                    picked.push(pool.remove(i).0);
                }
                picked.sort();
                picked
            }
        }
    }

    fn pick_victim(&mut self, rule: DeletionRule) -> NodeId {
        let nodes: Vec<(NodeId, usize)> = self.graph.degrees().collect();
        match rule {
            DeletionRule::Uniform => nodes[self.rng.gen_range(0..nodes.len())].0,
            DeletionRule::DegreeProportional => nodes[weighted_index(&mut self.rng, &nodes)].0,
        }
    }
}

/// Index drawn with probability proportional to degree; uniform when all
/// degrees are zero.
fn weighted_index(rng: &mut ChaCha8Rng, pool: &[(NodeId, usize)]) -> usize {
    let total: usize = pool.iter().map(|(_, k)| k).sum();
    if total == 0 {
        return rng.gen_range(0..pool.len());
    }
    let mut r = rng.gen_range(0..total);
    for (i, (_, k)) in pool.iter().enumerate() {
        if r < *k {
            return i;
        }
        r -= k;
    }
    unreachable!("r < total")
}

/// Runs one trial and keeps its full record.
pub fn run_trial(cfg: &SimConfig, trial_index: u64) -> Result<Trajectory> {
    cfg.validate()?;
    let mut walker = Walker::new(cfg, trial_index);
    let mut events = Vec::with_capacity(cfg.t_max);
    let mut censuses = vec![walker.graph.degree_census()];
    let mut snapshots = cfg.snapshots.then(|| vec![walker.graph.clone()]);
    for _ in 0..cfg.t_max {
        events.push(walker.step(&cfg.rule));
        censuses.push(walker.graph.degree_census());
        if let Some(s) = snapshots.as_mut() {
            s.push(walker.graph.clone());
        }
    }
    Ok(Trajectory {
        events,
        censuses,
        snapshots,
        final_graph: walker.graph,
    })
}

/// Mean degree fractions of one trial over its sampled snapshots.
fn trial_mean(cfg: &SimConfig, trial_index: u64) -> Vec<f64> {
    let mut walker = Walker::new(cfg, trial_index);
    let times = cfg.sample_times();
    let mut sum: Vec<f64> = Vec::new();
    let mut count = 0usize;
    let mut record = |g: &Graph| {
        let n = g.node_count() as f64;
        let census = g.degree_census();
        if sum.len() < census.len() {
            sum.resize(census.len(), 0.0);
        }
        for (s, c) in sum.iter_mut().zip(census) {
            *s += c as f64 / n;
        }
        count += 1;
    };
    if times.contains(&0) {
        record(&walker.graph);
    }
    for t in 1..=cfg.t_max {
        walker.step(&cfg.rule);
        if times.contains(&t) {
            record(&walker.graph);
        }
    }
    for s in &mut sum {
        *s /= count as f64;
    }
    sum
}

/// Degree distribution averaged over post-burn-in snapshots of all trials,
/// with a per-degree standard error from the spread of per-trial means.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalDistribution {
    pub probs: Vec<f64>,
    /// `None` with a single trial.
    pub std_err: Vec<Option<f64>>,
    pub trials: usize,
    pub samples: usize,
}

impl EmpiricalDistribution {
    pub fn distribution(&self) -> DegreeDistribution<f64> {
        DegreeDistribution::from_probs(self.probs.clone())
    }
}

pub fn empirical_degree_distribution(cfg: &SimConfig) -> Result<EmpiricalDistribution> {
    cfg.validate()?;
    let per_trial: Vec<Vec<f64>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| trial_mean(cfg, i))
        .collect();
    let len = per_trial.iter().map(Vec::len).max().unwrap_or(0);
    let trials = per_trial.len() as f64;
    let mut mean = vec![0.0; len];
    for v in &per_trial {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= trials;
    }
    let std_err = (0..len)
        .map(|k| {
            if per_trial.len() < 2 {
                return None;
            }
            let ss: f64 = per_trial
                .iter()
                .map(|v| {
                    let d = v.get(k).copied().unwrap_or(0.0) - mean[k];
                    d * d
                })
                .sum();
            Some((ss / (trials - 1.0)).sqrt() / trials.sqrt())
        })
        .collect();
    Ok(EmpiricalDistribution {
        probs: mean,
        std_err,
        trials: cfg.trials,
        samples: cfg.trials * cfg.samples_per_trial(),
    })
}

/// How often each node was the one deleted at step `step` (0-based),
/// over all trials. Trials without a deletion at that step are not
/// counted in any bucket.
pub fn deletion_frequencies(cfg: &SimConfig, step: usize) -> Result<BTreeMap<NodeId, f64>> {
    cfg.validate()?;
    if step >= cfg.t_max {
        return Err(Error::invalid(
            "step",
            format!("step {step} is beyond t_max = {}", cfg.t_max),
        ));
    }
    let victims: Vec<Option<NodeId>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut walker = Walker::new(cfg, i);
            let mut victim = None;
            for t in 0..=step {
                let event = walker.step(&cfg.rule);
                if t == step {
                    if let Event::Delete { node } = event {
                        victim = Some(node);
                    }
                }
            }
            victim
        })
        .collect();
    let mut counts: BTreeMap<NodeId, usize> = BTreeMap::new();
    for v in victims.into_iter().flatten() {
        *counts.entry(v).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(v, c)| (v, c as f64 / cfg.trials as f64))
        .collect())
}

/// Runs `f` on a dedicated pool of `workers` threads (`0` = rayon default).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::reference_four_node_graph;

    fn rule(p: f64, m: usize, delete: DeletionRule, n_floor: usize, n_cap: usize) -> EvolutionRule<f64> {
        EvolutionRule::new(p, m, AttachRule::Uniform, delete, n_floor, n_cap).unwrap()
    }

    #[test]
    fn pure_growth_builds_a_tree() {
        let cfg = SimConfig::new(rule(1.0, 1, DeletionRule::Uniform, 2, 100), 10, 1, 7);
        let tr = run_trial(&cfg, 0).unwrap();
        assert_eq!(tr.final_graph.node_count(), 12);
        assert_eq!(tr.final_graph.edge_count(), 11);
    }

    #[test]
    fn pure_uniform_decay_from_complete_graph() {
        let mut cfg = SimConfig::new(rule(0.0, 1, DeletionRule::Uniform, 2, 5), 4, 1, 3);
        cfg.initial = Some(Graph::complete(5));
        let tr = run_trial(&cfg, 0).unwrap();
        assert_eq!(tr.final_graph.node_count(), 2);
        assert_eq!(tr.final_graph.edge_count(), 1);
        assert!(matches!(tr.events[2], Event::Delete { .. }));
        assert_eq!(tr.events[3], Event::DeletionHeld);
    }

    #[test]
    fn zero_steps_gives_initial_distribution() {
        let mut cfg = SimConfig::new(rule(0.5, 1, DeletionRule::Uniform, 3, 10), 0, 1, 1);
        cfg.burn_in = 0;
        let emp = empirical_degree_distribution(&cfg).unwrap();
        assert_eq!(emp.probs, vec![0.0, 0.0, 1.0]);
        assert_eq!(emp.std_err, vec![None, None, None]);
        assert_eq!(emp.samples, 1);
    }

    #[test]
    fn deterministic_per_trial() {
        let mut cfg = SimConfig::new(rule(0.6, 2, DeletionRule::DegreeProportional, 2, 15), 200, 1, 99);
        cfg.snapshots = true;
        let a = run_trial(&cfg, 4).unwrap();
        let b = run_trial(&cfg, 4).unwrap();
        assert_eq!(a.events, b.events);
        assert_eq!(a.snapshots, b.snapshots);
        let c = run_trial(&cfg, 5).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = SimConfig::new(rule(0.7, 2, DeletionRule::DegreeProportional, 2, 30), 300, 16, 5);
        let one = with_workers(1, || empirical_degree_distribution(&cfg).unwrap());
        let four = with_workers(4, || empirical_degree_distribution(&cfg).unwrap());
        assert_eq!(one.probs, four.probs);
        assert_eq!(one.std_err, four.std_err);
    }

    #[test]
    fn validation_errors() {
        let mut cfg = SimConfig::new(rule(0.5, 1, DeletionRule::Uniform, 2, 10), 10, 0, 1);
        assert!(matches!(cfg.validate(), Err(Error::Invalid { field: "trials", .. })));
        cfg.trials = 1;
        cfg.burn_in = 10;
        assert!(matches!(cfg.validate(), Err(Error::Invalid { field: "burn_in", .. })));
        cfg.burn_in = 0;
        cfg.initial = Some(Graph::complete(11));
        assert!(matches!(cfg.validate(), Err(Error::Invalid { field: "initial", .. })));
        cfg.initial = None;
        cfg.rule.n_cap = 30;
        cfg.snapshots = true;
        assert!(matches!(cfg.validate(), Err(Error::Invalid { field: "snapshots", .. })));
    }

    #[test]
    fn one_step_deletion_frequencies_small_run() {
        let mut cfg = SimConfig::new(rule(0.0, 0, DeletionRule::DegreeProportional, 2, 4), 1, 20_000, 11);
        cfg.initial = Some(reference_four_node_graph());
        let f = deletion_frequencies(&cfg, 0).unwrap();
        let expected = [0.125, 0.375, 0.25, 0.25];
        for (i, e) in expected.iter().enumerate() {
            let got = f.get(&NodeId(i as u64 + 1)).copied().unwrap_or(0.0);
            assert!((got - e).abs() < 0.02, "node {} freq {got}", i + 1);
        }
    }
}
