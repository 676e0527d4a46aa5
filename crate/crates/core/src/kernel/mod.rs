//! State-space kernel over node states `(n, k)`.
//!
//! [`step_with`] advances a [`StateDistribution`] by one birth-death event;
//! [`steady_state`] iterates it to a fixed point of the degree marginal.

mod rule;
mod solver;
mod state;
mod step;
mod transitions;

pub use rule::{AttachRule, EvolutionRule};
pub use solver::{complete_graph_start, steady_state, Diagnostics, SolverOptions, SteadyState};
pub use state::{NodeState, StateDistribution, MASS_TOL};
pub use step::{step_state_distribution, step_with, StepOutcome};
pub use transitions::{
    combined_row, decay_image, decay_transition_row, growth_transitions, growth_transitions_in, isolated_reassignment,
    isolated_reassignment_normalized, state_level_survivor_row, survivor_transitions, uniform_deletion_transitions,
    DecayLevel, KernelMode, SurvivorSplit, TransitionRow,
};
