//! Monte Carlo estimate of the degree distribution with standard errors.
//!
//! ```text
//! cargo run --release --example simulate -- 200 4
//! ```

use espr::sim::{empirical_degree_distribution, run_trial, with_workers, SimConfig};
use espr::{AttachRule, DeletionRule, EvolutionRule};

fn main() -> espr::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let trials: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(200);
    let workers: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);

    let rule = EvolutionRule::new(0.7, 2, AttachRule::Uniform, DeletionRule::DegreeProportional, 2, 60)?;
    let cfg = SimConfig::new(rule, 2000, trials, 42);

    let tr = run_trial(&cfg, 0)?;
    println!(
        "trial 0 ends with {} nodes, {} edges",
        tr.final_graph.node_count(),
        tr.final_graph.edge_count()
    );

    let emp = with_workers(workers, || empirical_degree_distribution(&cfg))?;
    println!("{} trials, {} samples", emp.trials, emp.samples);
    for (k, p) in emp.probs.iter().enumerate().take(12) {
        let se = emp.std_err[k].map_or("n/a".to_string(), |s| format!("{s:.1e}"));
        println!("  P({k:>2}) = {p:.5} +/- {se}");
    }
    Ok(())
}
