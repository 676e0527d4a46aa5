use espr::kernel::{complete_graph_start, steady_state, SolverOptions};
use espr::sim::SimConfig;
use espr::verify::{compare_methods, monotone_tail_beyond_mode, small_graph_corpus};
use espr::{AttachRule, DeletionRule, EvolutionRule};

fn compare(p: f64, m: usize, delete: DeletionRule, n_cap: usize, seed: u64) -> espr::verify::CompareReport {
    let rule = EvolutionRule::new(p, m, AttachRule::Uniform, delete, 2, n_cap).unwrap();
    let mut cfg = SimConfig::new(rule.clone(), 2000, 200, seed);
    cfg.burn_in = 1000;
    compare_methods(&rule, &cfg, SolverOptions::default(), 0.02).unwrap()
}

#[test]
fn half_growth_uniform_matches_simulation() {
    let r = compare(0.5, 1, DeletionRule::Uniform, 20, 3);
    assert!(r.samples >= 100_000);
    assert!(r.pass, "TV {}", r.total_variation);
}

#[test]
fn mean_field_degree_proportional_is_close() {
    let r = compare(0.7, 2, DeletionRule::DegreeProportional, 60, 9);
    // informational in the report, but the approximation is good here
    assert_eq!(r.threshold, None);
    assert!(r.solver.converged);
    assert!(r.total_variation <= 0.02, "TV {}", r.total_variation);
}

#[test]
fn pure_growth_has_decreasing_tail() {
    for attach in [AttachRule::Uniform, AttachRule::Preferential] {
        let rule = EvolutionRule::new(1.0, 1, attach, DeletionRule::Uniform, 2, 80).unwrap();
        let ss = steady_state(&rule, &complete_graph_start(&rule), SolverOptions::default()).unwrap();
        assert!(ss.diagnostics.converged);
        // all mass ends at the cap
        assert!((ss.diagnostics.cap_pressure - 1.0).abs() < 1e-9);
        assert!(monotone_tail_beyond_mode(&ss.marginal, 1e-12), "{attach}");
    }
}

#[test]
fn seven_node_corpus_is_complete() {
    assert_eq!(small_graph_corpus(7, 7).len(), 1044);
    assert_eq!(small_graph_corpus(3, 7).len(), 4 + 11 + 34 + 156 + 1044);
}
