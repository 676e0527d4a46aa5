//! Enumeration against the kernel on every graph with 3 to 7 nodes.

use espr::verify::{small_graph_corpus, verify_theorem1_corpus};
use espr::{DeletionRule, Exact};

fn main() -> espr::Result<()> {
    let graphs = small_graph_corpus(3, 7);
    println!("{} non-isomorphic graphs", graphs.len());
    for rule in [DeletionRule::Uniform, DeletionRule::DegreeProportional] {
        let float = verify_theorem1_corpus::<f64>(&graphs, rule)?;
        let exact = verify_theorem1_corpus::<Exact>(&graphs, rule)?;
        println!(
            "{rule}: float max diff {:e}, exact mismatches {}",
            float.max_abs_diff, exact.failures
        );
    }
    Ok(())
}
