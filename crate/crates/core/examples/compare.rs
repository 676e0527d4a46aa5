//! Kernel steady state against Monte Carlo for the same rule.
//!
//! ```text
//! cargo run --release --example compare
//! ```

use espr::kernel::SolverOptions;
use espr::sim::SimConfig;
use espr::verify::{compare_methods, DEFAULT_TV_THRESHOLD};
use espr::{AttachRule, DeletionRule, EvolutionRule};

fn main() -> espr::Result<()> {
    for delete in [DeletionRule::Uniform, DeletionRule::DegreeProportional] {
        let rule = EvolutionRule::new(0.7, 2, AttachRule::Uniform, delete, 2, 60)?;
        let mut cfg = SimConfig::new(rule.clone(), 2000, 200, 1);
        cfg.burn_in = 1000;
        let r = compare_methods(&rule, &cfg, SolverOptions::default(), DEFAULT_TV_THRESHOLD)?;
        println!(
            "{delete}: TV = {:.5} over {} samples, pass = {}",
            r.total_variation, r.samples, r.pass
        );
        for k in 0..8.min(r.kernel.len()) {
            let z = r.z_scores[k].map_or("-".to_string(), |z| format!("{z:+.2}"));
            println!("  k={k}: kernel {:.5}  sim {:.5}  z {z}", r.kernel[k], r.simulation[k]);
        }
        for note in &r.notes {
            println!("  note: {note}");
        }
    }
    Ok(())
}
