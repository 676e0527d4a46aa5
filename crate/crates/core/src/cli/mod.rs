//! Command-line front end: `solve`, `simulate`, `enumerate` and `verify`.
//!
//! Every command resolves a [`config::Resolved`] configuration (TOML file,
//! then flags), runs, and returns named output files. With `--out DIR` the
//! files are written there; otherwise the primary one goes to stdout.
//! Tables carry a provenance header with the tool version and a SHA-256 of
//! the resolved configuration. Worker count never enters the output.

pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::ensemble::{
    average_degree_distribution, enumerate_deletion_step_with, state_distribution_of, EnumerationOptions, GraphEnsemble,
};
use crate::error::{Error, Result};
use crate::graph::{reference_four_node_graph, DegreeDistribution, DeletionRule, Graph};
use crate::kernel::{complete_graph_start, steady_state, AttachRule};
use crate::sim::{empirical_degree_distribution, with_workers};
use crate::verify::{
    compare_methods, small_graph_corpus, verify_theorem1, verify_theorem1_corpus, verify_theorem2, DEFAULT_TV_THRESHOLD,
};
use crate::weight::{render_f64, Exact, Weight};

use config::{ConfigFile, ModelSection, Resolved, SimulationSection, SolverSection};

pub const TOOL: &str = concat!("espr ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "espr",
    version,
    about = "Degree distributions of growing and shrinking networks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file with [model], [solver] and [simulation] tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "float", global = true)]
    pub mode: Mode,
    /// Worker threads; 0 uses every core. Does not change results.
    #[arg(long, env = "ESPR_WORKERS", default_value_t = 0, global = true)]
    pub workers: usize,
    /// Directory for output files; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,

    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub attach: Option<AttachArg>,
    #[arg(long, value_enum, global = true)]
    pub delete: Option<DeleteArg>,
    #[arg(long = "n_floor", alias = "n-floor", global = true)]
    pub n_floor: Option<usize>,
    #[arg(long = "n_cap", alias = "n-cap", global = true)]
    pub n_cap: Option<usize>,

    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "max_iters", alias = "max-iters", global = true)]
    pub max_iters: Option<usize>,
    #[arg(long = "max_cap_pressure", alias = "max-cap-pressure", global = true)]
    pub max_cap_pressure: Option<f64>,

    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long = "t_max", alias = "t-max", global = true)]
    pub t_max: Option<usize>,
    #[arg(long = "burn_in", alias = "burn-in", global = true)]
    pub burn_in: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Edge-list file with the starting graph.
    #[arg(long, global = true)]
    pub initial: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttachArg {
    Uniform,
    Preferential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeleteArg {
    Uniform,
    #[value(alias = "preferential")]
    DegreeProportional,
}

impl From<DeleteArg> for DeletionRule {
    fn from(d: DeleteArg) -> Self {
        match d {
            DeleteArg::Uniform => DeletionRule::Uniform,
            DeleteArg::DegreeProportional => DeletionRule::DegreeProportional,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the state equation to its stationary degree distribution.
    Solve,
    /// Monte Carlo estimate of the stationary degree distribution.
    Simulate,
    /// Enumerate every outcome of deletion steps from a graph or ensemble.
    Enumerate {
        /// Edge-list file, or an ensemble JSON written by a previous run.
        input: PathBuf,
        /// Deletion rule; defaults to the model's.
        #[arg(long, value_enum)]
        rule: Option<DeleteArg>,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Largest ensemble allowed before giving up.
        #[arg(long, default_value_t = crate::ensemble::DEFAULT_MEMBER_CAP)]
        cap: usize,
    },
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Enumeration average against the kernel for one graph or a corpus.
    Theorem1 {
        /// Edge-list file; the built-in four-node graph when absent.
        graph: Option<PathBuf>,
        /// Deletion rule; both rules when absent.
        #[arg(long, value_enum)]
        rule: Option<DeleteArg>,
        /// Run every graph with `--min-n ..= --max-n` nodes instead.
        #[arg(long)]
        corpus: bool,
        #[arg(long, default_value_t = 3)]
        min_n: usize,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
    },
    /// Symbolic uniform-deletion coefficients for all states up to n_max.
    Theorem2 {
        #[arg(long = "n_max", alias = "n-max", default_value_t = 50)]
        n_max: usize,
    },
    /// Kernel steady state against Monte Carlo.
    Compare {
        #[arg(long, default_value_t = DEFAULT_TV_THRESHOLD)]
        threshold: f64,
    },
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Validation = 1,
    Numerical = 2,
    Verification = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug)]
pub struct Output {
    /// The first file is the primary one.
    pub files: Vec<OutputFile>,
    pub status: Status,
    pub message: Option<String>,
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::CapLeakage { .. } | Error::DegenerateReassignment { .. } => Status::Numerical,
            _ => Status::Validation,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

impl GlobalArgs {
    fn overrides(&self) -> ConfigFile {
        ConfigFile {
            model: ModelSection {
                p: self.p,
                m: self.m,
                attach: self.attach.map(|a| match a {
                    AttachArg::Uniform => AttachRule::Uniform,
                    AttachArg::Preferential => AttachRule::Preferential,
                }),
                delete: self.delete.map(Into::into),
                n_floor: self.n_floor,
                n_cap: self.n_cap,
            },
            solver: SolverSection {
                tol: self.tol,
                max_iters: self.max_iters,
                max_cap_pressure: self.max_cap_pressure,
            },
            simulation: SimulationSection {
                trials: self.trials,
                t_max: self.t_max,
                burn_in: self.burn_in,
                seed: self.seed,
                initial: self.initial.clone(),
            },
        }
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let base = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::invalid("config", format!("{}: {e}", path.display())))?;
                ConfigFile::parse(&text)?
            }
            None => ConfigFile::default(),
        };
        base.overlay(&self.overrides()).resolve()
    }
}

struct Provenance {
    command: String,
    mode: Mode,
    hash: String,
    config: Value,
}

impl Provenance {
    fn new(command: &str, mode: Mode, resolved: &Resolved, inputs: &str) -> Self {
        let mode_name = match mode {
            Mode::Exact => "exact",
            Mode::Float => "float",
        };
        Provenance {
            command: command.to_string(),
            mode,
            hash: resolved.hash(&format!("|{command}|{mode_name}|{inputs}")),
            config: serde_json::to_value(resolved).expect("config serializes"),
        }
    }

    fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }

    fn csv_header(&self) -> String {
        format!(
            "# tool = {TOOL}\n# command = {}\n# mode = {}\n# config_sha256 = {}\n# config = {}\n",
            self.command,
            self.mode_name(),
            self.hash,
            self.config
        )
    }

    fn json(&self) -> Value {
        json!({
            "tool": TOOL,
            "command": self.command,
            "mode": self.mode_name(),
            "config_sha256": self.hash,
            "config": self.config,
        })
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn distribution_file<W: Weight>(
    stem: &str,
    format: Format,
    prov: &Provenance,
    extra: &[(&str, Value)],
    dist: &DegreeDistribution<W>,
) -> OutputFile {
    match format {
        Format::Csv => {
            let mut s = prov.csv_header();
            for (key, value) in extra {
                let _ = writeln!(s, "# {key} = {value}");
            }
            s.push_str("k,probability\n");
            for (k, p) in dist.probs().iter().enumerate() {
                let _ = writeln!(s, "{k},{}", p.render());
            }
            OutputFile {
                name: format!("{stem}.csv"),
                contents: s,
            }
        }
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("provenance".into(), prov.json());
            for (key, value) in extra {
                doc.insert(key.to_string(), value.clone());
            }
            doc.insert(
                "distribution".into(),
                Value::Array(dist.probs().iter().map(|p| Value::String(p.render())).collect()),
            );
            OutputFile {
                name: format!("{stem}.json"),
                contents: pretty(&Value::Object(doc)),
            }
        }
    }
}

/// `field,value` rows for every leaf of a JSON document.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, rows);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn report_file(format: Format, prov: &Provenance, report: &impl Serialize) -> OutputFile {
    let value = serde_json::to_value(report).expect("report serializes");
    match format {
        Format::Json => OutputFile {
            name: "report.json".into(),
            contents: pretty(&json!({ "provenance": prov.json(), "report": value })),
        },
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", &value, &mut rows);
            let mut s = prov.csv_header();
            s.push_str("field,value\n");
            for (k, v) in rows {
                let v = if v.contains(',') || v.contains('"') {
                    format!("\"{}\"", v.replace('"', "\"\""))
                } else {
                    v
                };
                let _ = writeln!(s, "{k},{v}");
            }
            OutputFile {
                name: "report.csv".into(),
                contents: s,
            }
        }
    }
}

fn read_graph(path: &Path) -> Result<(Graph, String)> {
    let text = std::fs::read_to_string(path)?;
    let g = Graph::parse_edge_list(&text).map_err(|e| Error::invalid("graph", format!("{}: {e}", path.display())))?;
    Ok((g, sha256_hex(text.as_bytes())))
}

fn float_only(command: &str, mode: Mode) -> Result<(), Failure> {
    if mode == Mode::Exact {
        return Err(Failure {
            status: Status::Validation,
            message: format!(
                "{command} runs in float mode; exact arithmetic is available for enumerate and verify theorem1"
            ),
        });
    }
    Ok(())
}

fn initial_digest(resolved: &Resolved) -> Result<String> {
    match &resolved.simulation.initial {
        Some(path) => Ok(read_graph(path)?.1),
        None => Ok(String::new()),
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    let resolved = g.resolve()?;
    match &cli.command {
        Command::Solve => solve(g, &resolved),
        Command::Simulate => simulate(g, &resolved),
        Command::Enumerate {
            input,
            rule,
            steps,
            cap,
        } => {
            let rule = rule.map(Into::into).unwrap_or(resolved.model.delete);
            match g.mode {
                Mode::Exact => enumerate::<Exact>(g, &resolved, input, rule, *steps, *cap),
                Mode::Float => enumerate::<f64>(g, &resolved, input, rule, *steps, *cap),
            }
        }
        Command::Verify { check } => verify(g, &resolved, check),
    }
}

fn solve(g: &GlobalArgs, resolved: &Resolved) -> Result<Output, Failure> {
    float_only("solve", g.mode)?;
    let rule = resolved.rule()?;
    let init = match &resolved.simulation.initial {
        Some(path) => state_distribution_of(&GraphEnsemble::<f64>::singleton(read_graph(path)?.0)),
        None => complete_graph_start(&rule),
    };
    let prov = Provenance::new("solve", g.mode, resolved, &initial_digest(resolved)?);
    let ss = steady_state(&rule, &init, resolved.solver_options())?;
    let diag = serde_json::to_value(&ss.diagnostics).expect("diagnostics serialize");
    let primary = distribution_file("steady_state", g.format, &prov, &[("diagnostics", diag)], &ss.marginal);
    let state = OutputFile {
        name: "state.txt".into(),
        contents: ss.state.to_table(),
    };
    let (status, message) = if ss.diagnostics.converged {
        (Status::Success, None)
    } else {
        (
            Status::Numerical,
            Some(format!(
                "solver did not converge in {} iterations (residual {:e})",
                ss.diagnostics.iterations, ss.diagnostics.residual
            )),
        )
    };
    Ok(Output {
        files: vec![primary, state],
        status,
        message,
    })
}

fn simulate(g: &GlobalArgs, resolved: &Resolved) -> Result<Output, Failure> {
    float_only("simulate", g.mode)?;
    let cfg = resolved.sim_config()?;
    let prov = Provenance::new("simulate", g.mode, resolved, &initial_digest(resolved)?);
    let emp = with_workers(g.workers, || empirical_degree_distribution(&cfg))?;
    let se = |k: usize| emp.std_err[k].map(render_f64).unwrap_or_else(|| "NA".into());
    let file = match g.format {
        Format::Csv => {
            let mut s = prov.csv_header();
            let _ = writeln!(s, "# trials = {}\n# samples = {}", emp.trials, emp.samples);
            s.push_str("k,probability,std_err\n");
            for (k, p) in emp.probs.iter().enumerate() {
                let _ = writeln!(s, "{k},{},{}", render_f64(*p), se(k));
            }
            OutputFile {
                name: "simulation.csv".into(),
                contents: s,
            }
        }
        Format::Json => {
            let rows: Vec<Value> = emp
                .probs
                .iter()
                .enumerate()
                .map(|(k, p)| json!({ "k": k, "probability": render_f64(*p), "std_err": se(k) }))
                .collect();
            OutputFile {
                name: "simulation.json".into(),
                contents: pretty(&json!({
                    "provenance": prov.json(),
                    "trials": emp.trials,
                    "samples": emp.samples,
                    "distribution": rows,
                })),
            }
        }
    };
    Ok(Output {
        files: vec![file],
        status: Status::Success,
        message: None,
    })
}

fn enumerate<W: Weight>(
    g: &GlobalArgs,
    resolved: &Resolved,
    input: &Path,
    rule: DeletionRule,
    steps: usize,
    cap: usize,
) -> Result<Output, Failure> {
    let text = std::fs::read_to_string(input).map_err(Error::from)?;
    let start = if text.trim_start().starts_with('{') {
        GraphEnsemble::<W>::from_json(&text)?
    } else {
        GraphEnsemble::singleton(
            Graph::parse_edge_list(&text).map_err(|e| Error::invalid("graph", format!("{}: {e}", input.display())))?,
        )
    };
    let inputs = format!("{}|{rule}|{steps}|{cap}", sha256_hex(text.as_bytes()));
    let prov = Provenance::new("enumerate", g.mode, resolved, &inputs);
    let opts = EnumerationOptions { cap, n_floor: 1 };
    let mut e = start;
    for _ in 0..steps {
        e = with_workers(g.workers, || enumerate_deletion_step_with(&e, rule, opts))?;
    }
    let avg = average_degree_distribution(&e);
    let mut ensemble = e.to_json();
    ensemble.push('\n');
    Ok(Output {
        files: vec![
            OutputFile {
                name: "ensemble.json".into(),
                contents: ensemble,
            },
            distribution_file("average", g.format, &prov, &[("members", json!(e.len()))], &avg),
        ],
        status: Status::Success,
        message: None,
    })
}

fn verdict(pass: bool, what: &str) -> (Status, Option<String>) {
    if pass {
        (Status::Success, None)
    } else {
        (Status::Verification, Some(format!("{what} check failed")))
    }
}

fn verify(g: &GlobalArgs, resolved: &Resolved, check: &VerifyCommand) -> Result<Output, Failure> {
    let (file, status, message) = match check {
        VerifyCommand::Theorem1 {
            graph,
            rule,
            corpus,
            min_n,
            max_n,
        } => {
            let rules: Vec<DeletionRule> = match rule {
                Some(r) => vec![(*r).into()],
                None => vec![DeletionRule::Uniform, DeletionRule::DegreeProportional],
            };
            if *corpus {
                if *max_n > 7 || min_n > max_n {
                    return Err(Error::invalid("max_n", "corpus sizes must satisfy min_n <= max_n <= 7").into());
                }
                let graphs = small_graph_corpus(*min_n, *max_n);
                let reports = rules
                    .iter()
                    .map(|&r| match g.mode {
                        Mode::Exact => verify_theorem1_corpus::<Exact>(&graphs, r),
                        Mode::Float => verify_theorem1_corpus::<f64>(&graphs, r),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let pass = reports.iter().all(|r| r.pass);
                let prov = Provenance::new(
                    "verify theorem1",
                    g.mode,
                    resolved,
                    &format!("corpus|{min_n}|{max_n}|{rules:?}"),
                );
                let (s, m) = verdict(pass, "theorem1 corpus");
                (report_file(g.format, &prov, &reports), s, m)
            } else {
                let (graph, digest) = match graph {
                    Some(path) => read_graph(path)?,
                    None => (reference_four_node_graph(), "reference".to_string()),
                };
                let reports = rules
                    .iter()
                    .map(|&r| match g.mode {
                        Mode::Exact => verify_theorem1::<Exact>(&graph, r),
                        Mode::Float => verify_theorem1::<f64>(&graph, r),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let pass = reports.iter().all(|r| r.pass);
                let prov = Provenance::new("verify theorem1", g.mode, resolved, &format!("{digest}|{rules:?}"));
                let (s, m) = verdict(pass, "theorem1");
                (report_file(g.format, &prov, &reports), s, m)
            }
        }
        VerifyCommand::Theorem2 { n_max } => {
            let report = verify_theorem2(*n_max)?;
            let prov = Provenance::new("verify theorem2", g.mode, resolved, &n_max.to_string());
            let (s, m) = verdict(report.pass, "theorem2");
            (report_file(g.format, &prov, &report), s, m)
        }
        VerifyCommand::Compare { threshold } => {
            float_only("verify compare", g.mode)?;
            let rule = resolved.rule()?;
            let cfg = resolved.sim_config()?;
            let prov = Provenance::new(
                "verify compare",
                g.mode,
                resolved,
                &format!("{}|{}", initial_digest(resolved)?, render_f64(*threshold)),
            );
            let report = with_workers(g.workers, || {
                compare_methods(&rule, &cfg, resolved.solver_options(), *threshold)
            })?;
            let (s, m) = if report.solver.converged {
                verdict(report.pass, "compare")
            } else {
                (Status::Numerical, Some("solver did not converge".to_string()))
            };
            (report_file(g.format, &prov, &report), s, m)
        }
    };
    Ok(Output {
        files: vec![file],
        status,
        message,
    })
}

fn emit(out: &Option<PathBuf>, output: &Output) -> std::io::Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for f in &output.files {
                std::fs::write(dir.join(&f.name), &f.contents)?;
            }
            Ok(())
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            if let Some(f) = output.files.first() {
                stdout.write_all(f.contents.as_bytes())?;
            }
            stdout.flush()
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Validation.code() } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(output) => {
            if let Err(e) = emit(&cli.global.out, &output) {
                eprintln!("error: {e}");
                return Status::Validation.code();
            }
            if let Some(msg) = &output.message {
                eprintln!("{msg}");
            }
            output.status.code()
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.status.code()
        }
    }
}
