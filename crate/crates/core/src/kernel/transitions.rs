//! Transition probabilities between node states.
//!
//! A growth event moves a node from size `n` to `n + 1`; a deletion event
//! moves it to `n - 1`, either as a survivor (keeping its degree or losing
//! the edge to the deleted neighbor) or, for the deleted node itself, by
//! re-entering the smaller network through the isolated-node reassignment.

use std::collections::BTreeMap;

use crate::ensemble::GraphEnsemble;
use crate::error::{Error, Result};
use crate::graph::{deletion_probabilities, DeletionRule, Graph, NodeId};
use crate::kernel::rule::{AttachRule, EvolutionRule};
use crate::kernel::state::{NodeState, StateDistribution};
use crate::weight::Weight;

/// Outgoing probabilities of one source state.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow<W = f64> {
    pub source: NodeState,
    pub targets: BTreeMap<NodeState, W>,
}

impl<W: Weight> TransitionRow<W> {
    pub fn new(source: NodeState) -> Self {
        TransitionRow {
            source,
            targets: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, target: NodeState, w: W) {
        let entry = self.targets.entry(target).or_insert_with(W::zero);
        *entry = entry.clone() + w;
    }

    pub fn get(&self, target: NodeState) -> W {
        self.targets.get(&target).cloned().unwrap_or_else(W::zero)
    }

    pub fn total(&self) -> W {
        self.targets.values().cloned().fold(W::zero(), |a, b| a + b)
    }

    /// Entries towards size `n`, indexed by degree.
    pub fn to_level(&self, n: usize) -> Vec<W> {
        (0..n).map(|k| self.get(NodeState::new_unchecked(n, k))).collect()
    }

    fn scaled(mut self, factor: &W) -> Self {
        for w in self.targets.values_mut() {
            *w = w.clone() * factor.clone();
        }
        self
    }
}

/// How the fate of a surviving node is split when some other node is
/// deleted, plus the node's own removal probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivorSplit<W = f64> {
    /// Probability that a non-neighbor is deleted (degree kept).
    pub stay: W,
    /// Probability that a neighbor is deleted (degree drops by one).
    pub lose_one: W,
    /// Probability that this node is the one deleted.
    pub removal: W,
}

/// Where decay rows get their survivor probabilities from.
#[derive(Debug)]
pub enum KernelMode<'a, W = f64> {
    /// Node-level probabilities averaged over the nodes of a reference
    /// ensemble. Exact for the ensemble it is given.
    Ensemble(&'a GraphEnsemble<W>),
    /// Probabilities from the state distribution alone. For uniform
    /// deletion this is exact; for degree-proportional deletion it assumes
    /// uncorrelated neighbor degrees.
    MeanField,
}

impl<W> Clone for KernelMode<'_, W> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<W> Copy for KernelMode<'_, W> {}

fn ratio<W: Weight>(num: usize, den: usize) -> W {
    W::from_ratio(num as u64, den as u64)
}

fn min_one<W: Weight>(x: W) -> W {
    if x > W::one() {
        W::one()
    } else {
        x
    }
}

/// Growth fragment of a state: an existing node gains an edge with
/// probability `gain`; the newcomer occupies `(n+1, m)` with share
/// `1/(n+1)`. Totals `p`.
fn growth_fragment<W: Weight>(s: NodeState, p: &W, m: usize, gain: W) -> TransitionRow<W> {
    let n = s.n;
    let old_share = p.clone() * ratio::<W>(n, n + 1);
    let mut row = TransitionRow::new(s);
    row.add(
        NodeState::new_unchecked(n + 1, s.k),
        old_share.clone() * (W::one() - gain.clone()),
    );
    row.add(NodeState::new_unchecked(n + 1, s.k + 1), old_share * gain);
    row.add(NodeState::new_unchecked(n + 1, m), p.clone() * ratio::<W>(1, n + 1));
    row.targets.retain(|_, w| !w.is_zero());
    row
}

/// Growth transitions under uniform attachment:
/// `(n+1, k)` gets `(n-m)p/(n+1)`, `(n+1, k+1)` gets `mp/(n+1)` and the
/// newcomer state `(n+1, m)` gets `p/(n+1)`.
pub fn growth_transitions<W: Weight>(s: NodeState, rule: &EvolutionRule<W>) -> Result<TransitionRow<W>> {
    if rule.attach != AttachRule::Uniform {
        return Err(Error::invalid(
            "attach",
            "preferential growth depends on the state distribution; use growth_transitions_in",
        ));
    }
    if rule.m > s.n {
        return Err(Error::AttachmentTooLarge { m: rule.m, n: s.n });
    }
    Ok(growth_fragment(s, &rule.p, rule.m, ratio(rule.m, s.n)))
}

/// Growth transitions for either attachment rule. Preferential attachment
/// gives a degree-`k` node an edge with probability
/// `min(1, m k / sum_w k_w)`, where the degree sum comes from the
/// conditional degree distribution at size `n`.
pub fn growth_transitions_in<W: Weight>(
    sd: &StateDistribution<W>,
    s: NodeState,
    rule: &EvolutionRule<W>,
) -> Result<TransitionRow<W>> {
    if rule.m > s.n {
        return Err(Error::AttachmentTooLarge { m: rule.m, n: s.n });
    }
    let gains = attachment_gains(sd.conditional(s.n).as_deref(), s.n, rule.m, rule.attach);
    Ok(growth_fragment(s, &rule.p, rule.m, gains[s.k].clone()))
}

/// Per-degree probability that an existing node at size `n` receives an
/// edge from the newcomer.
fn attachment_gains<W: Weight>(cond: Option<&[W]>, n: usize, m: usize, attach: AttachRule) -> Vec<W> {
    let uniform = || vec![ratio::<W>(m, n); n];
    match (attach, cond) {
        (AttachRule::Uniform, _) | (AttachRule::Preferential, None) => uniform(),
        (AttachRule::Preferential, Some(cond)) => {
            let mean = mean_degree(cond);
            if mean.is_zero() {
                return uniform();
            }
            let degree_sum = mean * W::from_count(n);
            (0..n)
                .map(|k| min_one(W::from_count(m * k) / degree_sum.clone()))
                .collect()
        }
    }
}

fn mean_degree<W: Weight>(cond: &[W]) -> W {
    cond.iter()
        .enumerate()
        .fold(W::zero(), |acc, (k, p)| acc + W::from_count(k) * p.clone())
}

fn second_moment<W: Weight>(cond: &[W]) -> W {
    cond.iter()
        .enumerate()
        .fold(W::zero(), |acc, (k, p)| acc + W::from_count(k * k) * p.clone())
}

/// Uniform deletion transitions: `(n-1, k)` gets `(n-k-1)q/(n-1)` and
/// `(n-1, k-1)` gets `kq/(n-1)`. At `n = 1` nothing can be removed and the
/// mass stays put.
pub fn uniform_deletion_transitions<W: Weight>(s: NodeState, q_decay: &W) -> TransitionRow<W> {
    let mut row = TransitionRow::new(s);
    let n = s.n;
    if n < 2 {
        row.add(s, q_decay.clone());
        return row;
    }
    if s.k + 1 < n {
        row.add(
            NodeState::new_unchecked(n - 1, s.k),
            q_decay.clone() * ratio::<W>(n - s.k - 1, n - 1),
        );
    }
    if s.k > 0 {
        row.add(
            NodeState::new_unchecked(n - 1, s.k - 1),
            q_decay.clone() * ratio::<W>(s.k, n - 1),
        );
    }
    row.targets.retain(|_, w| !w.is_zero());
    row
}

/// Survivor probabilities of node `v` in `g`: `stay` sums the removal
/// probabilities of non-neighbors other than `v`, `lose_one` those of the
/// neighbors.
pub fn survivor_transitions<W: Weight>(g: &Graph, v: NodeId, rule: DeletionRule) -> Result<SurvivorSplit<W>> {
    let neighbors = g.neighbors(v).ok_or(Error::UnknownNode(v))?;
    if g.node_count() < 2 {
        return Err(Error::OutsideBounds {
            n: 1,
            floor: 2,
            cap: usize::MAX,
        });
    }
    let q = deletion_probabilities::<W>(g, rule);
    let mut split = SurvivorSplit {
        stay: W::zero(),
        lose_one: W::zero(),
        removal: W::zero(),
    };
    for (w, qw) in q.probs {
        if w == v {
            split.removal = qw;
        } else if neighbors.contains(&w) {
            split.lose_one = split.lose_one + qw;
        } else {
            split.stay = split.stay + qw;
        }
    }
    Ok(split)
}

/// Node-averaged survivor split over every node occupying `s` in `e`, each
/// node weighted by its member's probability.
pub fn state_level_survivor_row<W: Weight>(
    e: &GraphEnsemble<W>,
    s: NodeState,
    rule: DeletionRule,
) -> Result<SurvivorSplit<W>> {
    ensemble_level(e, s.n, rule)?
        .get(s.k)
        .cloned()
        .flatten()
        .ok_or(Error::UnoccupiedState(s))
}

/// Averaged splits for every degree at size `n`; `None` where no node of
/// the ensemble has that degree.
fn ensemble_level<W: Weight>(
    e: &GraphEnsemble<W>,
    n: usize,
    rule: DeletionRule,
) -> Result<Vec<Option<SurvivorSplit<W>>>> {
    let zero = || SurvivorSplit {
        stay: W::zero(),
        lose_one: W::zero(),
        removal: W::zero(),
    };
    let mut sums: Vec<Option<(SurvivorSplit<W>, W)>> = vec![None; n];
    for (g, w) in e.iter().filter(|(g, _)| g.node_count() == n) {
        let q = deletion_probabilities::<W>(g, rule);
        for v in g.nodes() {
            let neighbors = g.neighbors(v).expect("node of g");
            let k = neighbors.len();
            let (acc, norm) = sums[k].get_or_insert_with(|| (zero(), W::zero()));
            for (u, qu) in &q.probs {
                let term = w.clone() * qu.clone();
                if *u == v {
                    acc.removal = acc.removal.clone() + term;
                } else if neighbors.contains(u) {
                    acc.lose_one = acc.lose_one.clone() + term;
                } else {
                    acc.stay = acc.stay.clone() + term;
                }
            }
            *norm = norm.clone() + w.clone();
        }
    }
    Ok(sums
        .into_iter()
        .map(|entry| {
            entry.map(|(acc, norm)| SurvivorSplit {
                stay: acc.stay / norm.clone(),
                lose_one: acc.lose_one / norm.clone(),
                removal: acc.removal / norm,
            })
        })
        .collect())
}

fn uniform_split<W: Weight>(n: usize, k: usize) -> SurvivorSplit<W> {
    SurvivorSplit {
        stay: ratio(n - k - 1, n),
        lose_one: ratio(k, n),
        removal: ratio(1, n),
    }
}

/// Splits at size `n` computed from the conditional degree distribution.
///
/// Degree-proportional removal uses `q_k = k / (n <k>)`. A degree-`k` node
/// loses an edge with probability `k <k^2> / (n <k>^2)`, the expected
/// removal weight of `k` neighbors drawn from the edge-end degree
/// distribution. Both are capped so every split is a distribution, which
/// matters only for conditionals no graph can realize; a node adjacent to
/// all others always loses an edge.
fn mean_field_level<W: Weight>(cond: &[W], n: usize, rule: DeletionRule) -> Vec<Option<SurvivorSplit<W>>> {
    let mean = mean_degree(cond);
    if rule == DeletionRule::Uniform || mean.is_zero() {
        return (0..n).map(|k| Some(uniform_split(n, k))).collect();
    }
    let second = second_moment(cond);
    let size = W::from_count(n);
    (0..n)
        .map(|k| {
            let kw = W::from_count(k);
            let mut removal = kw.clone() / (size.clone() * mean.clone());
            if removal > W::one() {
                removal = W::one();
            }
            let survive = W::one() - removal.clone();
            let lose = kw * second.clone() / (size.clone() * mean.clone() * mean.clone());
            let lose_one = if k + 1 == n || lose > survive {
                survive.clone()
            } else {
                lose
            };
            Some(SurvivorSplit {
                stay: survive - lose_one.clone(),
                lose_one,
                removal,
            })
        })
        .collect()
}

/// Reassignment distribution over degrees `0..n-1` of the smaller network
/// (simplified form):
/// `r_k' = n/(n-1) [P_k' stay(k') + P_{k'+1} lose_one(k'+1)]`
/// with `P` the degree distribution conditional on size `n`. The deleted
/// node re-enters state `(n-1, k')` with probability `r_k'`.
pub fn isolated_reassignment<W: Weight>(cond: &[W], splits: &[Option<SurvivorSplit<W>>]) -> Result<Vec<W>> {
    let n = cond.len();
    check_reassignment_defined(cond, splits)?;
    let factor = ratio::<W>(n, n - 1);
    Ok((0..n - 1)
        .map(|k| factor.clone() * survivor_inflow(cond, splits, k))
        .collect())
}

/// Same distribution in normalized form: each surviving state contributes
/// its survival-weighted share `P_j (1 - q_j) / sum_i P_i (1 - q_i)`,
/// split between keeping and losing a degree in proportion to
/// `stay : lose_one`. Agrees with [`isolated_reassignment`] whenever the
/// mean removal probability at size `n` is `1/n`.
pub fn isolated_reassignment_normalized<W: Weight>(cond: &[W], splits: &[Option<SurvivorSplit<W>>]) -> Result<Vec<W>> {
    let n = cond.len();
    let denom = check_reassignment_defined(cond, splits)?;
    let share = |j: usize, keep: bool| -> W {
        match splits.get(j).and_then(Option::as_ref) {
            Some(sp) if !cond[j].is_zero() => {
                let survive = sp.stay.clone() + sp.lose_one.clone();
                if survive.is_zero() {
                    return W::zero();
                }
                let part = if keep { sp.stay.clone() } else { sp.lose_one.clone() };
                (W::one() - sp.removal.clone()) * cond[j].clone() / denom.clone() * part / survive
            }
            _ => W::zero(),
        }
    };
    Ok((0..n - 1)
        .map(|k| share(k, true) + if k + 1 < n { share(k + 1, false) } else { W::zero() })
        .collect())
}

/// `P_k stay(k) + P_{k+1} lose_one(k+1)`.
fn survivor_inflow<W: Weight>(cond: &[W], splits: &[Option<SurvivorSplit<W>>], k: usize) -> W {
    let term = |j: usize, keep: bool| -> W {
        match (cond.get(j), splits.get(j).and_then(Option::as_ref)) {
            (Some(p), Some(sp)) if !p.is_zero() => p.clone() * if keep { sp.stay.clone() } else { sp.lose_one.clone() },
            _ => W::zero(),
        }
    };
    term(k, true) + term(k + 1, false)
}

/// Returns `sum_j P_j (1 - q_j)`, failing when it vanishes or a state
/// carrying mass has no split.
fn check_reassignment_defined<W: Weight>(cond: &[W], splits: &[Option<SurvivorSplit<W>>]) -> Result<W> {
    let n = cond.len();
    if n < 2 {
        return Err(Error::DegenerateReassignment { n });
    }
    let mut denom = W::zero();
    for (k, p) in cond.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let sp = splits
            .get(k)
            .and_then(Option::as_ref)
            .ok_or(Error::UnoccupiedState(NodeState::new_unchecked(n, k)))?;
        denom = denom + p.clone() * (W::one() - sp.removal.clone());
    }
    if denom <= W::zero() {
        return Err(Error::DegenerateReassignment { n });
    }
    Ok(denom)
}

/// Everything needed to push mass from size `n` to `n - 1` in one
/// deletion event.
#[derive(Debug, Clone)]
pub struct DecayLevel<W = f64> {
    pub n: usize,
    pub splits: Vec<Option<SurvivorSplit<W>>>,
    pub reassignment: Vec<W>,
}

impl<W: Weight> DecayLevel<W> {
    /// Builds the level for size `n >= 2` of `sd`.
    pub fn build(sd: &StateDistribution<W>, n: usize, rule: DeletionRule, mode: KernelMode<'_, W>) -> Result<Self> {
        let cond = sd.conditional(n).ok_or(Error::DegenerateReassignment { n })?;
        let (splits, reassignment) = match mode {
            KernelMode::Ensemble(e) => {
                let splits = ensemble_level(e, n, rule)?;
                let r = isolated_reassignment(&cond, &splits)?;
                (splits, r)
            }
            // the caps can break sum_k P_k q_k = 1/n, which only the
            // normalized form tolerates; otherwise the forms coincide
            KernelMode::MeanField => {
                let splits = mean_field_level(&cond, n, rule);
                let r = isolated_reassignment_normalized(&cond, &splits)?;
                (splits, r)
            }
        };
        Ok(DecayLevel {
            n,
            splits,
            reassignment,
        })
    }

    pub fn split(&self, k: usize) -> Result<&SurvivorSplit<W>> {
        self.splits
            .get(k)
            .and_then(Option::as_ref)
            .ok_or(Error::UnoccupiedState(NodeState::new_unchecked(self.n, k)))
    }

    /// Full deletion row of `(n, k)`:
    /// `[k'=k] stay + [k'=k-1] lose_one + removal * r_k'`. Sums to one.
    pub fn row(&self, k: usize) -> Result<TransitionRow<W>> {
        let source = NodeState::new(self.n, k)?;
        let sp = self.split(k)?;
        let mut row = TransitionRow::new(source);
        for (kp, r) in self.reassignment.iter().enumerate() {
            row.add(NodeState::new_unchecked(self.n - 1, kp), sp.removal.clone() * r.clone());
        }
        if k < self.n - 1 {
            row.add(NodeState::new_unchecked(self.n - 1, k), sp.stay.clone());
        }
        if k > 0 {
            row.add(NodeState::new_unchecked(self.n - 1, k - 1), sp.lose_one.clone());
        }
        Ok(row)
    }

    /// Image of the joint mass `level` (indexed by degree at size `n`)
    /// under one deletion, indexed by degree at size `n - 1`. Equivalent to
    /// summing `level[k] * row(k)` without materializing the rows.
    pub fn apply(&self, level: &[W]) -> Result<Vec<W>> {
        let n = self.n;
        let mut out = vec![W::zero(); n - 1];
        let mut removed = W::zero();
        for (k, p) in level.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let sp = self.split(k)?;
            if k < n - 1 {
                out[k] = out[k].clone() + p.clone() * sp.stay.clone();
            }
            if k > 0 {
                out[k - 1] = out[k - 1].clone() + p.clone() * sp.lose_one.clone();
            }
            removed = removed + p.clone() * sp.removal.clone();
        }
        for (o, r) in out.iter_mut().zip(&self.reassignment) {
            *o = o.clone() + removed.clone() * r.clone();
        }
        Ok(out)
    }
}

/// Deletion row of state `s` given the current distribution.
pub fn decay_transition_row<W: Weight>(
    sd: &StateDistribution<W>,
    s: NodeState,
    rule: DeletionRule,
    mode: KernelMode<'_, W>,
) -> Result<TransitionRow<W>> {
    if s.n < 2 {
        let mut row = TransitionRow::new(s);
        row.add(s, W::one());
        return Ok(row);
    }
    DecayLevel::build(sd, s.n, rule, mode)?.row(s.k)
}

/// Applies one deletion event to every size `>= 2`; size-1 mass stays put.
pub fn decay_image<W: Weight>(
    sd: &StateDistribution<W>,
    rule: DeletionRule,
    mode: KernelMode<'_, W>,
) -> Result<StateDistribution<W>> {
    let mut levels: BTreeMap<usize, Vec<W>> = BTreeMap::new();
    for (&n, level) in sd.levels() {
        if level.iter().all(|w| w.is_zero()) {
            continue;
        }
        if n < 2 {
            add_level(&mut levels, n, level.to_vec());
            continue;
        }
        let image = DecayLevel::build(sd, n, rule, mode)?.apply(level)?;
        add_level(&mut levels, n - 1, image);
    }
    Ok(StateDistribution::from_levels(levels, sd.t + 1))
}

pub(crate) fn add_level<W: Weight>(levels: &mut BTreeMap<usize, Vec<W>>, n: usize, add: Vec<W>) {
    let level = levels.entry(n).or_insert_with(|| vec![W::zero(); n]);
    for (a, b) in level.iter_mut().zip(add) {
        *a = a.clone() + b;
    }
}

/// Full one-step row of `s` under `rule`, growth and deletion combined,
/// with the reflecting boundaries at `n_floor` and `n_cap`.
pub fn combined_row<W: Weight>(
    sd: &StateDistribution<W>,
    s: NodeState,
    rule: &EvolutionRule<W>,
    mode: KernelMode<'_, W>,
) -> Result<TransitionRow<W>> {
    let mut row = TransitionRow::new(s);
    if !rule.p.is_zero() {
        if s.n >= rule.n_cap {
            row.add(s, rule.p.clone());
        } else {
            for (t, w) in growth_transitions_in(sd, s, rule)?.targets {
                row.add(t, w);
            }
        }
    }
    let q = rule.q();
    if !q.is_zero() {
        if s.n <= rule.n_floor {
            row.add(s, q);
        } else {
            for (t, w) in decay_transition_row(sd, s, rule.delete, mode)?.scaled(&q).targets {
                row.add(t, w);
            }
        }
    }
    row.targets.retain(|_, w| !w.is_zero());
    Ok(row)
}

/// Per-degree growth gains at size `n` (used by the step function).
pub(crate) fn gains_for<W: Weight>(sd: &StateDistribution<W>, n: usize, rule: &EvolutionRule<W>) -> Vec<W> {
    attachment_gains(sd.conditional(n).as_deref(), n, rule.m, rule.attach)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::state_distribution_of;
    use crate::graph::reference_four_node_graph;
    use crate::weight::Exact;

    fn q(n: u64, d: u64) -> Exact {
        Exact::from_ratio(n, d)
    }

    fn st(n: usize, k: usize) -> NodeState {
        NodeState::new(n, k).unwrap()
    }

    fn growth_rule(p: Exact, m: usize) -> EvolutionRule<Exact> {
        EvolutionRule {
            p,
            m,
            attach: AttachRule::Uniform,
            delete: DeletionRule::Uniform,
            n_floor: 2,
            n_cap: 100,
        }
    }

    #[test]
    fn growth_substituted() {
        let row = growth_transitions(st(4, 2), &growth_rule(q(1, 1), 1)).unwrap();
        assert_eq!(row.get(st(5, 2)), q(3, 5));
        assert_eq!(row.get(st(5, 3)), q(1, 5));
        assert_eq!(row.get(st(5, 1)), q(1, 5));
        assert_eq!(row.total(), q(1, 1));
    }

    #[test]
    fn growth_without_growth_is_empty() {
        let row = growth_transitions(st(4, 2), &growth_rule(q(0, 1), 1)).unwrap();
        assert!(row.targets.is_empty());
    }

    #[test]
    fn growth_newcomer_coincides_with_survivor() {
        let row = growth_transitions(st(3, 1), &growth_rule(q(1, 1), 1)).unwrap();
        assert_eq!(row.targets.len(), 2);
        assert_eq!(row.get(st(4, 1)), q(3, 4));
        assert_eq!(row.get(st(4, 2)), q(1, 4));
    }

    #[test]
    fn growth_rejects_oversized_attachment() {
        assert!(matches!(
            growth_transitions(st(2, 1), &growth_rule(q(1, 1), 3)),
            Err(Error::AttachmentTooLarge { m: 3, n: 2 })
        ));
    }

    #[test]
    fn uniform_deletion_substituted() {
        let row = uniform_deletion_transitions(st(4, 2), &q(1, 1));
        assert_eq!(row.get(st(3, 2)), q(1, 3));
        assert_eq!(row.get(st(3, 1)), q(2, 3));
        let row = uniform_deletion_transitions(st(6, 0), &q(1, 2));
        assert_eq!(row.targets.len(), 1);
        assert_eq!(row.get(st(5, 0)), q(1, 2));
        let row = uniform_deletion_transitions(st(5, 4), &q(1, 1));
        assert_eq!(row.get(st(4, 3)), q(1, 1));
        assert_eq!(row.targets.len(), 1);
    }

    #[test]
    fn survivor_reference_graph_node_one() {
        let g = reference_four_node_graph();
        let sp = survivor_transitions::<Exact>(&g, NodeId(1), DeletionRule::DegreeProportional).unwrap();
        assert_eq!(sp.stay, q(1, 2));
        assert_eq!(sp.lose_one, q(3, 8));
        assert_eq!(sp.removal, q(1, 8));
    }

    #[test]
    fn survivor_uniform_depends_only_on_degree() {
        let g = Graph::path(5);
        for v in g.nodes() {
            let k = g.degree(v).unwrap() as u64;
            let sp = survivor_transitions::<Exact>(&g, v, DeletionRule::Uniform).unwrap();
            assert_eq!(sp.stay, q(5 - k - 1, 5));
            assert_eq!(sp.lose_one, q(k, 5));
        }
        let sp =
            survivor_transitions::<Exact>(&Graph::complete(4), NodeId(1), DeletionRule::DegreeProportional).unwrap();
        assert_eq!(sp.stay, q(0, 1));
    }

    #[test]
    fn state_level_rows() {
        let e = GraphEnsemble::<Exact>::singleton(reference_four_node_graph());
        let sp = state_level_survivor_row(&e, st(4, 2), DeletionRule::DegreeProportional).unwrap();
        assert_eq!(sp.stay, q(1, 8));
        assert_eq!(sp.lose_one, q(5, 8));
        assert!(matches!(
            state_level_survivor_row(&e, st(4, 0), DeletionRule::DegreeProportional),
            Err(Error::UnoccupiedState(_))
        ));
        let sp = state_level_survivor_row(&e, st(4, 1), DeletionRule::Uniform).unwrap();
        assert_eq!((sp.stay, sp.lose_one), (q(2, 4), q(1, 4)));
    }

    #[test]
    fn reassignment_reference_values() {
        let e = GraphEnsemble::<Exact>::singleton(reference_four_node_graph());
        let sd = state_distribution_of(&e);
        let level = DecayLevel::build(&sd, 4, DeletionRule::DegreeProportional, KernelMode::Ensemble(&e)).unwrap();
        assert_eq!(level.reassignment, vec![q(1, 8), q(7, 12), q(7, 24)]);
        let cond = sd.conditional(4).unwrap();
        let general = isolated_reassignment_normalized(&cond, &level.splits).unwrap();
        assert_eq!(general, level.reassignment);
    }

    #[test]
    fn reference_decay_rows() {
        let e = GraphEnsemble::<Exact>::singleton(reference_four_node_graph());
        let sd = state_distribution_of(&e);
        let mode = KernelMode::Ensemble(&e);
        let rule = DeletionRule::DegreeProportional;
        let rows = [
            (1, [q(75, 192), q(110, 192), q(7, 192)]),
            (2, [q(3, 96), q(74, 96), q(19, 96)]),
            (3, [q(3, 64), q(14, 64), q(47, 64)]),
        ];
        for (k, expected) in rows {
            let row = decay_transition_row(&sd, st(4, k), rule, mode).unwrap();
            assert_eq!(row.to_level(3), expected.to_vec(), "row k={k}");
            assert_eq!(row.total(), q(1, 1));
        }
    }

    #[test]
    fn decay_image_matches_row_sum() {
        let e = GraphEnsemble::<Exact>::singleton(reference_four_node_graph());
        let sd = state_distribution_of(&e);
        let mode = KernelMode::Ensemble(&e);
        let image = decay_image(&sd, DeletionRule::DegreeProportional, mode).unwrap();
        assert_eq!(image.level(3).unwrap(), &[q(1, 8), q(7, 12), q(7, 24)]);
    }

    #[test]
    fn uniform_reassignment_bracket() {
        // r_k' = 1/(n-1) [P_k'(n-k'-1) + P_{k'+1}(k'+1)]
        let cond = vec![q(1, 10), q(2, 10), q(3, 10), q(4, 10)];
        let splits: Vec<_> = (0..4).map(|k| Some(uniform_split::<Exact>(4, k))).collect();
        let r = isolated_reassignment(&cond, &splits).unwrap();
        for kp in 0..3usize {
            let expected =
                (cond[kp].clone() * q((4 - kp - 1) as u64, 1) + cond[kp + 1].clone() * q((kp + 1) as u64, 1)) / q(3, 1);
            assert_eq!(r[kp], expected);
        }
    }

    #[test]
    fn reassignment_degenerate() {
        let cond: Vec<Exact> = vec![q(1, 1)];
        assert!(matches!(
            isolated_reassignment(&cond, &[None]),
            Err(Error::DegenerateReassignment { n: 1 })
        ));
    }

    #[test]
    fn mean_field_uniform_is_closed_form() {
        let sd = StateDistribution::<Exact>::point(st(5, 2));
        let level = DecayLevel::build(&sd, 5, DeletionRule::Uniform, KernelMode::MeanField).unwrap();
        for k in 0..5 {
            assert_eq!(level.split(k).unwrap(), &uniform_split(5, k));
        }
    }

    #[test]
    fn combined_row_boundaries() {
        let rule = EvolutionRule {
            p: q(1, 2),
            m: 1,
            attach: AttachRule::Uniform,
            delete: DeletionRule::Uniform,
            n_floor: 2,
            n_cap: 3,
        };
        let sd = StateDistribution::<Exact>::point(st(3, 1));
        let row = combined_row(&sd, st(3, 1), &rule, KernelMode::MeanField).unwrap();
        assert_eq!(row.get(st(3, 1)), q(1, 2));
        assert_eq!(row.total(), q(1, 1));
        let sd = StateDistribution::<Exact>::point(st(2, 1));
        let row = combined_row(&sd, st(2, 1), &rule, KernelMode::MeanField).unwrap();
        assert_eq!(row.get(st(2, 1)), q(1, 2));
        assert_eq!(row.total(), q(1, 1));
    }
}
