//! Exhaustive deletion steps from a graph, tracking the full ensemble.
//!
//! ```text
//! cargo run --example enumerate                 # 6-node path, 3 steps
//! cargo run --example enumerate -- graph.txt 2  # edge-list file, 2 steps
//! ```

use espr::ensemble::{average_degree_distribution, enumerate_deletion_step, GraphEnsemble};
use espr::{DeletionRule, Exact, Graph, Weight};

fn main() -> espr::Result<()> {
    let mut args = std::env::args().skip(1);
    let g = match args.next() {
        Some(path) => Graph::parse_edge_list(&std::fs::read_to_string(path)?)?,
        None => Graph::path(6),
    };
    let steps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    for rule in [DeletionRule::Uniform, DeletionRule::DegreeProportional] {
        let mut e = GraphEnsemble::<Exact>::singleton(g.clone());
        println!("{rule}");
        for t in 1..=steps {
            if e.max_size() < 2 {
                break;
            }
            e = enumerate_deletion_step(&e, rule)?;
            let avg: Vec<String> = average_degree_distribution(&e)
                .probs()
                .iter()
                .map(Weight::render)
                .collect();
            println!("  t={t}: {} members, P_k = ({})", e.len(), avg.join(", "));
        }
    }
    Ok(())
}
