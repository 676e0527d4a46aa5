//! Degree distributions of evolving networks with node addition and node
//! deletion, uniform or proportional to degree.
//!
//! * [`graph`]: small simple graphs, degree statistics, removal
//!   probabilities.
//! * [`ensemble`]: probability-weighted graph ensembles and the exhaustive
//!   one-step deletion enumeration.
//! * [`kernel`]: transition probabilities between node states `(n, k)`, the
//!   state update and the steady-state solver.
//! * [`sim`]: Monte Carlo simulation of single network trajectories.
//! * [`verify`]: cross-checks between the kernel, the enumeration and the
//!   simulator.
//! * [`cli`]: configuration and report emission behind the `espr` binary.
//!
//! Probabilities are generic over [`Weight`]: `f64`, or [`Exact`] rationals
//! for identity checks.
//!
//! ```
//! use espr::ensemble::{average_degree_distribution, enumerate_deletion_step, GraphEnsemble};
//! use espr::graph::{reference_four_node_graph, DeletionRule};
//! use espr::{Exact, Weight};
//!
//! let e = GraphEnsemble::<Exact>::singleton(reference_four_node_graph());
//! let next = enumerate_deletion_step(&e, DeletionRule::DegreeProportional).unwrap();
//! let avg = average_degree_distribution(&next);
//! assert_eq!(avg.get(1), Exact::from_ratio(7, 12));
//! ```

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod graph;
pub mod kernel;
pub mod sim;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
pub use graph::{DegreeDistribution, DeletionRule, Graph, NodeId};
pub use kernel::{AttachRule, EvolutionRule, NodeState, StateDistribution};
pub use weight::{Exact, Weight};
