//! One deletion step on the four-node reference graph, in exact arithmetic.
//!
//! ```text
//! cargo run --example reference_graph
//! ```

use espr::graph::{deletion_probabilities, reference_four_node_graph};
use espr::verify::verify_theorem1;
use espr::{DeletionRule, Exact, Weight};

fn main() -> espr::Result<()> {
    let g = reference_four_node_graph();
    print!("{}", g.to_edge_list());

    let q = deletion_probabilities::<Exact>(&g, DeletionRule::DegreeProportional);
    for (v, p) in &q.probs {
        println!("q[{v}] = {}", p.render());
    }

    let report = verify_theorem1::<Exact>(&g, DeletionRule::DegreeProportional)?;
    for (k, row) in &report.decay_rows {
        println!("row from (4,{k}): {}", row.join(", "));
    }
    for o in &report.outcomes {
        println!(
            "delete {} (p = {}): ({})",
            o.deleted,
            o.probability,
            o.distribution.join(", ")
        );
    }
    println!("enumeration: ({})", report.enumeration.join(", "));
    println!("kernel:      ({})", report.kernel.join(", "));
    for note in &report.notes {
        println!("note: {note}");
    }
    Ok(())
}
