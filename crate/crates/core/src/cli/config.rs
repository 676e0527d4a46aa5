//! Run configuration: a TOML document with `[model]`, `[solver]` and
//! `[simulation]` tables, every key overridable from the command line.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{DeletionRule, Graph};
use crate::kernel::{AttachRule, EvolutionRule, SolverOptions};
use crate::sim::SimConfig;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub simulation: SimulationSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub p: Option<f64>,
    pub m: Option<usize>,
    pub attach: Option<AttachRule>,
    pub delete: Option<DeletionRule>,
    pub n_floor: Option<usize>,
    pub n_cap: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub max_cap_pressure: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub trials: Option<usize>,
    pub t_max: Option<usize>,
    pub burn_in: Option<usize>,
    pub seed: Option<u64>,
    /// Edge-list file for the starting graph.
    pub initial: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid("config", e.to_string().trim_end().to_string()))
    }

    /// Layers `over` on top of `self`; set keys in `over` win.
    pub fn overlay(mut self, over: &ConfigFile) -> Self {
        macro_rules! take {
            ($section:ident . $($key:ident),+) => {
                $( if over.$section.$key.is_some() { self.$section.$key = over.$section.$key.clone(); } )+
            };
        }
        take!(model.p, m, attach, delete, n_floor, n_cap);
        take!(solver.tol, max_iters, max_cap_pressure);
        take!(simulation.trials, t_max, burn_in, seed, initial);
        self
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let m = self.model.m.unwrap_or(1);
        let model = ResolvedModel {
            p: self.model.p.unwrap_or(0.5),
            m,
            attach: self.model.attach.unwrap_or(AttachRule::Uniform),
            delete: self.model.delete.unwrap_or(DeletionRule::Uniform),
            n_floor: self.model.n_floor.unwrap_or(m.max(2)),
            n_cap: self.model.n_cap.unwrap_or(60),
        };
        if !(0.0..=1.0).contains(&model.p) {
            return Err(Error::invalid(
                "p",
                format!("growth probability {} is outside [0, 1]", model.p),
            ));
        }
        if model.m > model.n_floor {
            return Err(Error::invalid(
                "m",
                format!(
                    "attachment count {} exceeds n_floor = {}, the smallest network it must attach to",
                    model.m, model.n_floor
                ),
            ));
        }
        let solver = ResolvedSolver {
            tol: self.solver.tol.unwrap_or(1e-10),
            max_iters: self.solver.max_iters.unwrap_or(200_000),
            max_cap_pressure: self.solver.max_cap_pressure,
        };
        if solver.tol.is_nan() || solver.tol <= 0.0 {
            return Err(Error::invalid("tol", "must be positive"));
        }
        let t_max = self.simulation.t_max.unwrap_or(2000);
        let simulation = ResolvedSimulation {
            trials: self.simulation.trials.unwrap_or(100),
            t_max,
            burn_in: self.simulation.burn_in.unwrap_or(t_max / 2),
            seed: self.simulation.seed.unwrap_or(0),
            initial: self.simulation.initial.clone(),
        };
        let resolved = Resolved {
            model,
            solver,
            simulation,
        };
        resolved.rule()?;
        Ok(resolved)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedModel {
    pub p: f64,
    pub m: usize,
    pub attach: AttachRule,
    pub delete: DeletionRule,
    pub n_floor: usize,
    pub n_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedSolver {
    pub tol: f64,
    pub max_iters: usize,
    pub max_cap_pressure: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedSimulation {
    pub trials: usize,
    pub t_max: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub initial: Option<PathBuf>,
}

/// Fully defaulted configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub model: ResolvedModel,
    pub solver: ResolvedSolver,
    pub simulation: ResolvedSimulation,
}

impl Resolved {
    pub fn rule(&self) -> Result<EvolutionRule<f64>> {
        let m = &self.model;
        EvolutionRule::new(m.p, m.m, m.attach, m.delete, m.n_floor, m.n_cap)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver.tol,
            max_iters: self.solver.max_iters,
            max_cap_pressure: self.solver.max_cap_pressure,
        }
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let s = &self.simulation;
        let initial = match &s.initial {
            Some(path) => Some(Graph::parse_edge_list(&std::fs::read_to_string(path)?)?),
            None => None,
        };
        let cfg = SimConfig {
            rule: self.rule()?,
            t_max: s.t_max,
            trials: s.trials,
            seed: s.seed,
            burn_in: s.burn_in,
            initial,
            snapshots: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Compact JSON of the resolved configuration (stable key order).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`Resolved::canonical_json`] plus `extra` (mode, inputs).
    pub fn hash(&self, extra: &str) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_json().as_bytes());
        h.update(extra.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
