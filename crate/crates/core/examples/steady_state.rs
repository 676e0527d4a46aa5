//! Stationary degree distribution from the state equation.
//!
//! ```text
//! cargo run --release --example steady_state -- 0.7 2 60
//! ```

use espr::kernel::{complete_graph_start, steady_state, SolverOptions};
use espr::{AttachRule, DeletionRule, EvolutionRule};

fn main() -> espr::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.7);
    let m: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let n_cap: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(60);

    for delete in [DeletionRule::Uniform, DeletionRule::DegreeProportional] {
        let rule = EvolutionRule::new(p, m, AttachRule::Uniform, delete, m.max(2), n_cap)?;
        let ss = steady_state(&rule, &complete_graph_start(&rule), SolverOptions::default())?;
        let d = &ss.diagnostics;
        println!(
            "{delete}: converged={} after {} iterations, residual {:.2e}, mass held at cap {:.4}",
            d.converged, d.iterations, d.residual, d.cap_pressure
        );
        for (k, pk) in ss.marginal.probs().iter().enumerate().take(12) {
            println!("  P({k:>2}) = {pk:.6}");
        }
    }
    Ok(())
}
