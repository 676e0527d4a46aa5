use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::rule::EvolutionRule;
use crate::kernel::state::StateDistribution;
use crate::kernel::transitions::{add_level, gains_for, DecayLevel, KernelMode};
use crate::weight::Weight;

/// Result of one update together with the growth mass that hit the cap.
#[derive(Debug, Clone)]
pub struct StepOutcome<W = f64> {
    pub next: StateDistribution<W>,
    /// Growth probability mass that tried to leave `n_cap` and was held
    /// there.
    pub cap_pressure: W,
}

/// One step of the state equation in mean-field mode (exact for uniform
/// deletion).
pub fn step_state_distribution<W: Weight>(
    sd: &StateDistribution<W>,
    rule: &EvolutionRule<W>,
) -> Result<StateDistribution<W>> {
    Ok(step_with(sd, rule, KernelMode::MeanField, None)?.next)
}

/// One step of the state equation: growth with probability `p`, deletion
/// with probability `q = 1 - p`, reflecting at `n_floor` and `n_cap`.
///
/// `max_cap_pressure`, when set, turns growth mass held at the cap above
/// that level into an error.
pub fn step_with<W: Weight>(
    sd: &StateDistribution<W>,
    rule: &EvolutionRule<W>,
    mode: KernelMode<'_, W>,
    max_cap_pressure: Option<f64>,
) -> Result<StepOutcome<W>> {
    for n in sd.sizes() {
        if n < rule.n_floor || n > rule.n_cap {
            return Err(Error::OutsideBounds {
                n,
                floor: rule.n_floor,
                cap: rule.n_cap,
            });
        }
    }
    let p = rule.p.clone();
    let q = rule.q();
    let mut next: BTreeMap<usize, Vec<W>> = BTreeMap::new();
    let mut cap_pressure = W::zero();

    for (&n, level) in sd.levels() {
        let mass = level.iter().cloned().fold(W::zero(), |a, b| a + b);
        if mass.is_zero() {
            continue;
        }

        if !p.is_zero() {
            if n >= rule.n_cap {
                cap_pressure = cap_pressure + p.clone() * mass.clone();
                add_level(&mut next, n, scale(level, &p));
            } else {
                if rule.m > n {
                    return Err(Error::AttachmentTooLarge { m: rule.m, n });
                }
                let gains = gains_for(sd, n, rule);
                let old_share = p.clone() * W::from_ratio(n as u64, n as u64 + 1);
                let mut grown = vec![W::zero(); n + 1];
                for (k, w) in level.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    let moved = w.clone() * old_share.clone();
                    grown[k] = grown[k].clone() + moved.clone() * (W::one() - gains[k].clone());
                    grown[k + 1] = grown[k + 1].clone() + moved * gains[k].clone();
                }
                grown[rule.m] = grown[rule.m].clone() + mass.clone() * p.clone() * W::from_ratio(1, n as u64 + 1);
                add_level(&mut next, n + 1, grown);
            }
        }

        if !q.is_zero() {
            if n <= rule.n_floor {
                add_level(&mut next, n, scale(level, &q));
            } else {
                let image = DecayLevel::build(sd, n, rule.delete, mode)?.apply(level)?;
                add_level(&mut next, n - 1, scale(&image, &q));
            }
        }
    }

    if let Some(limit) = max_cap_pressure {
        let leaked = cap_pressure.to_f64();
        if leaked > limit {
            return Err(Error::CapLeakage {
                leaked,
                cap: rule.n_cap,
            });
        }
    }

    Ok(StepOutcome {
        next: StateDistribution::from_levels(next, sd.t + 1),
        cap_pressure,
    })
}

fn scale<W: Weight>(level: &[W], factor: &W) -> Vec<W> {
    level.iter().map(|w| w.clone() * factor.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{state_distribution_of, GraphEnsemble};
    use crate::graph::{reference_four_node_graph, DeletionRule};
    use crate::kernel::rule::AttachRule;
    use crate::kernel::state::NodeState;
    use crate::kernel::transitions::{combined_row, growth_transitions};
    use crate::weight::Exact;

    fn q(n: u64, d: u64) -> Exact {
        Exact::from_ratio(n, d)
    }

    fn st(n: usize, k: usize) -> NodeState {
        NodeState::new(n, k).unwrap()
    }

    #[test]
    fn pure_decay_of_reference_graph() {
        let e = GraphEnsemble::<Exact>::singleton(reference_four_node_graph());
        let sd = state_distribution_of(&e);
        let rule = EvolutionRule::pure_decay(DeletionRule::DegreeProportional, 2, 4);
        let out = step_with(&sd, &rule, KernelMode::Ensemble(&e), None).unwrap();
        assert_eq!(out.next.level(3).unwrap(), &[q(1, 8), q(7, 12), q(7, 24)]);
        assert_eq!(out.next.total(), q(1, 1));
        assert_eq!(out.next.t, 1);
    }

    #[test]
    fn pure_growth_is_the_growth_fragment() {
        let rule = EvolutionRule {
            p: q(1, 1),
            m: 1,
            attach: AttachRule::Uniform,
            delete: DeletionRule::Uniform,
            n_floor: 2,
            n_cap: 10,
        };
        let s = st(4, 2);
        let next = step_state_distribution(&StateDistribution::point(s), &rule).unwrap();
        let row = growth_transitions(s, &rule).unwrap();
        assert_eq!(next.level(5).unwrap(), row.to_level(5).as_slice());
    }

    #[test]
    fn linear_in_growth_and_decay() {
        let mut mass = BTreeMap::new();
        mass.insert(st(4, 1), q(1, 3));
        mass.insert(st(4, 3), q(1, 6));
        mass.insert(st(5, 2), q(1, 2));
        let sd = StateDistribution::from_map(mass, 0).unwrap();
        let base = EvolutionRule {
            p: q(1, 2),
            m: 2,
            attach: AttachRule::Uniform,
            delete: DeletionRule::Uniform,
            n_floor: 2,
            n_cap: 10,
        };
        let mixed = step_state_distribution(&sd, &base).unwrap();
        let grow = step_state_distribution(
            &sd,
            &EvolutionRule {
                p: q(1, 1),
                ..base.clone()
            },
        )
        .unwrap();
        let decay = step_state_distribution(
            &sd,
            &EvolutionRule {
                p: q(0, 1),
                ..base.clone()
            },
        )
        .unwrap();
        for n in 3..=6 {
            for k in 0..n {
                let s = st(n, k);
                assert_eq!(mixed.get(s), q(1, 2) * grow.get(s) + q(1, 2) * decay.get(s));
            }
        }
    }

    #[test]
    fn step_equals_sum_of_rows() {
        let mut mass = BTreeMap::new();
        mass.insert(st(3, 1), q(1, 4));
        mass.insert(st(3, 2), q(1, 4));
        mass.insert(st(4, 0), q(1, 8));
        mass.insert(st(4, 2), q(3, 8));
        let sd = StateDistribution::from_map(mass, 0).unwrap();
        for delete in [DeletionRule::Uniform, DeletionRule::DegreeProportional] {
            for attach in [AttachRule::Uniform, AttachRule::Preferential] {
                let rule = EvolutionRule {
                    p: q(2, 5),
                    m: 2,
                    attach,
                    delete,
                    n_floor: 3,
                    n_cap: 4,
                };
                let next = step_with(&sd, &rule, KernelMode::MeanField, None).unwrap().next;
                let mut via_rows: BTreeMap<NodeState, Exact> = BTreeMap::new();
                for (s, w) in sd.iter() {
                    let row = combined_row(&sd, s, &rule, KernelMode::MeanField).unwrap();
                    assert_eq!(row.total(), q(1, 1));
                    for (t, r) in row.targets {
                        let e = via_rows.entry(t).or_insert_with(|| q(0, 1));
                        *e = e.clone() + w.clone() * r;
                    }
                }
                for (t, w) in via_rows {
                    assert_eq!(next.get(t), w, "{delete} {attach} at {t}");
                }
                assert_eq!(next.total(), q(1, 1));
            }
        }
    }

    #[test]
    fn cap_pressure_reported_and_limited() {
        let rule = EvolutionRule {
            p: q(1, 1),
            m: 1,
            attach: AttachRule::Uniform,
            delete: DeletionRule::Uniform,
            n_floor: 2,
            n_cap: 3,
        };
        let sd = StateDistribution::point(st(3, 2));
        let out = step_with(&sd, &rule, KernelMode::MeanField, None).unwrap();
        assert_eq!(out.cap_pressure, q(1, 1));
        let mut expected = sd.clone();
        expected.t = 1;
        assert_eq!(out.next, expected);
        assert!(matches!(
            step_with(&sd, &rule, KernelMode::MeanField, Some(0.5)),
            Err(Error::CapLeakage { cap: 3, .. })
        ));
    }

    #[test]
    fn rejects_out_of_bounds() {
        let rule = EvolutionRule::<Exact>::pure_decay(DeletionRule::Uniform, 3, 5);
        let sd = StateDistribution::point(st(2, 1));
        assert!(matches!(
            step_state_distribution(&sd, &rule),
            Err(Error::OutsideBounds { n: 2, .. })
        ));
    }
}
