//! Transition rows of single node states: growth, uniform deletion, and
//! the full combined row inside a state distribution.

use espr::kernel::{combined_row, growth_transitions, uniform_deletion_transitions, KernelMode};
use espr::{AttachRule, DeletionRule, EvolutionRule, Exact, NodeState, StateDistribution, Weight};

fn show(label: &str, row: &espr::kernel::TransitionRow<Exact>) {
    let parts: Vec<String> = row
        .targets
        .iter()
        .map(|(s, w)| format!("{s}: {}", w.render()))
        .collect();
    println!("{label}: {}", parts.join(", "));
}

fn main() -> espr::Result<()> {
    let s = NodeState::new(4, 2)?;
    let grow = EvolutionRule::<Exact>::new(
        Exact::from_ratio(1, 1),
        1,
        AttachRule::Uniform,
        DeletionRule::Uniform,
        2,
        10,
    )?;
    show("growth (4,2), p=1, m=1", &growth_transitions(s, &grow)?);
    show(
        "uniform deletion (4,2), q=1",
        &uniform_deletion_transitions(s, &Exact::from_ratio(1, 1)),
    );

    let rule = EvolutionRule::<Exact>::new(
        Exact::from_ratio(1, 2),
        1,
        AttachRule::Uniform,
        DeletionRule::Uniform,
        2,
        10,
    )?;
    let sd = StateDistribution::point(s);
    let row = combined_row(&sd, s, &rule, KernelMode::MeanField)?;
    show("combined (4,2), p=1/2", &row);
    println!("row total = {}", row.total().render());
    Ok(())
}
