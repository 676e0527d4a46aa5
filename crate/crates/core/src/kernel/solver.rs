use serde::Serialize;

use crate::error::Result;
use crate::graph::DegreeDistribution;
use crate::kernel::rule::EvolutionRule;
use crate::kernel::state::{NodeState, StateDistribution};
use crate::kernel::step::step_with;
use crate::kernel::transitions::KernelMode;
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once the L1 change of the degree marginal falls below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Per-step growth mass held at the cap above which the solve fails.
    pub max_cap_pressure: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iters: 200_000,
            max_cap_pressure: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// L1 change of the degree marginal in the last step.
    pub residual: f64,
    pub converged: bool,
    /// Growth mass held at `n_cap` in the last step.
    pub cap_pressure: f64,
    /// Largest per-step cap pressure seen.
    pub peak_cap_pressure: f64,
    /// `|total mass - 1|` of the final state.
    pub mass_error: f64,
    /// Largest per-step change of total mass.
    pub max_mass_drift: f64,
}

#[derive(Debug, Clone)]
pub struct SteadyState<W = f64> {
    pub marginal: DegreeDistribution<W>,
    pub state: StateDistribution<W>,
    pub diagnostics: Diagnostics,
}

/// Point mass on the complete graph of `n_floor` nodes.
pub fn complete_graph_start<W: Weight>(rule: &EvolutionRule<W>) -> StateDistribution<W> {
    StateDistribution::point(NodeState::new_unchecked(rule.n_floor, rule.n_floor - 1))
}

/// Iterates the state equation until the degree marginal stops moving.
///
/// Non-convergence is not an error: the returned diagnostics carry
/// `converged = false`.
pub fn steady_state<W: Weight>(
    rule: &EvolutionRule<W>,
    init: &StateDistribution<W>,
    opts: SolverOptions,
) -> Result<SteadyState<W>> {
    rule.validate()?;
    init.validate()?;
    let mut sd = init.clone();
    let mut marginal = sd.degree_marginal().to_f64();
    let mut diag = Diagnostics {
        iterations: 0,
        residual: f64::INFINITY,
        converged: false,
        cap_pressure: 0.0,
        peak_cap_pressure: 0.0,
        mass_error: 0.0,
        max_mass_drift: 0.0,
    };
    while diag.iterations < opts.max_iters {
        let before = sd.total().to_f64();
        let out = step_with(&sd, rule, KernelMode::MeanField, opts.max_cap_pressure)?;
        sd = out.next;
        diag.iterations += 1;
        diag.cap_pressure = out.cap_pressure.to_f64();
        diag.peak_cap_pressure = diag.peak_cap_pressure.max(diag.cap_pressure);
        diag.max_mass_drift = diag.max_mass_drift.max((sd.total().to_f64() - before).abs());

        let next_marginal = sd.degree_marginal().to_f64();
        diag.residual = 2.0 * next_marginal.total_variation(&marginal);
        marginal = next_marginal;
        if diag.residual < opts.tol {
            diag.converged = true;
            break;
        }
    }
    diag.mass_error = (sd.total().to_f64() - 1.0).abs();
    Ok(SteadyState {
        marginal: sd.degree_marginal(),
        state: sd,
        diagnostics: diag,
    })
}
