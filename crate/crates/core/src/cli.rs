//! Command-line driver: experiment configuration, dispatch to the library, and CSV/JSON
//! artifacts. The `nlinterp` binary is a thin wrapper around [`main_with_args`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::accretive::OperatorConfig;
use crate::error::{Error, Result};
use crate::grid::{fmt_f64, GridParams, LogGrid};
use crate::harness::{
    is_theorem, qlaplace_regularity, run_theorem, InitialData, SuiteOptions, TheoremReport, CSV_HEADER,
    SCHEMA_VERSION, THEOREMS,
};
use crate::interpolation::{interp_from_profile, k_profile, AccretiveCouple};
use crate::semigroup::evolve;
use crate::spaces::{hardy_norm_estimate, FunctionSpace};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "NLINTERP_OUT";
/// Output directory when neither `--out-dir` nor the environment sets one.
pub const DEFAULT_OUT: &str = "nlinterp-out";

/// Exit status when a run completed and some asserted check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for invalid configurations, violated preconditions and runtime errors.
pub const EXIT_ERROR: i32 = 2;

const AFTER_HELP: &str = "\
Artifacts (under --out-dir, default $NLINTERP_OUT or ./nlinterp-out):
  k-profile    k_profile.csv     t, K_over_t, K_lower_over_t
               k_profile.json    N_E^tau bounds and the resolved configuration
  evolve       trajectory.csv    t, x0, x1, ...
               trajectory.json   Lipschitz estimate and refinement increments
  verify ID    verify/ID/NN-<instance>.json   one schema-versioned report per instance
               verify/ID/rows.csv             theorem, instance, node_t, lhs, rhs, constant,
                                              residual, chain, slack, holds
               verify/summary.csv, verify/summary.json
  qlaplace     qlaplace/<family>-q<q>-theta<theta>.json and rows.csv
  hardy-norm   hardy_norm.json   estimate and analytic bound of the Hardy operator
Every run also writes config.json, the configuration after flags and --config merged.
Exit status: 0 when every asserted check passes, 1 when a check fails, 2 on errors.";

#[derive(Debug, Parser)]
#[command(name = "nlinterp", version, about = "Interpolation of nonlinear couples and accretive operators", after_help = AFTER_HELP)]
pub struct Cli {
    /// List the theorem ids accepted by `verify`.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Option<Command>,
}

/// Flags shared by every subcommand.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Operator, e.g. `scalar:a=1`, `qlaplace:q=3,n=64`, `energy:energy=abs,k=1`, `matrix:path=m.csv`.
    #[arg(long, global = true)]
    pub op: Option<String>,
    /// Point as comma-separated coordinates; default `1` in one dimension, else a smooth vector drawn from --seed.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// Function space: `theta=0.5,p=2`, `L1`, `Linf` or `L1capLinf`.
    #[arg(long, global = true)]
    pub space: Option<String>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Smallest grid node.
    #[arg(long, global = true)]
    pub t_min: Option<f64>,
    /// Largest grid node.
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    /// Number of grid nodes.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// JSON file whose fields override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// K(x,t)/t on the grid and bounds for N_E^tau(x).
    KProfile,
    /// Exponential-formula trajectory of x under -A.
    Evolve {
        /// Final time.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Nodewise check of one estimate (`--list` for ids) or `all`.
    Verify {
        id: String,
        /// Concurrent checks for `verify all`.
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        params: VerifyArgs,
    },
    /// Speed norm against the interpolation function along the q-Laplace flow.
    Qlaplace {
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        /// smooth, hat, rough or zero.
        #[arg(long)]
        family: Option<String>,
        /// Interior mesh points.
        #[arg(long)]
        n: Option<usize>,
        /// Final time T.
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Lower estimate of the Hardy operator norm against its analytic bound.
    HardyNorm {
        /// Number of trial functions.
        #[arg(long)]
        trials: Option<usize>,
    },
}

/// Parameters of `verify`; unset values select the defaults of each check.
#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Shifts h of I+hA.
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub families: Option<Vec<String>>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
}

/// Command of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    KProfile,
    Evolve,
    Verify,
    Qlaplace,
    HardyNorm,
}

/// Fully resolved parameters of one run. A JSON config file with any subset of these
/// fields overrides the corresponding flags; `op` may be given as a JSON object or in
/// the command-line form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<CommandKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    #[serde(deserialize_with = "op_spec", skip_serializing_if = "Option::is_none")]
    pub op: Option<OperatorConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<FunctionSpace>,
    pub grid: Option<GridParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<InitialData>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
}

fn op_spec<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<OperatorConfig>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OpForm {
        Text(String),
        Object(OperatorConfig),
    }
    match Option::<OpForm>::deserialize(d)? {
        None => Ok(None),
        Some(OpForm::Object(c)) => Ok(Some(c)),
        Some(OpForm::Text(s)) => OperatorConfig::parse(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    /// Reads a JSON config file.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Parameter(format!("cannot read config {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fields set in `other` replace those of `self`.
    pub fn overlay(&mut self, other: &ExperimentConfig) -> Result<()> {
        if let (Some(a), Some(b)) = (self.command, other.command) {
            if a != b {
                return Err(Error::Parameter(format!(
                    "config file is for command {b:?}, but the subcommand is {a:?}"
                )));
            }
        }
        overlay!(
            self, other, command, theorem, op, x, space, grid, tau, horizon, theta, p, q, h, epsilon, samples,
            families, n, steps, trials, jobs, seed
        );
        Ok(())
    }

    /// Builds the configuration from parsed flags, then applies `--config`.
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let c = &cli.common;
        let mut cfg = ExperimentConfig {
            op: c.op.as_deref().map(OperatorConfig::parse).transpose()?,
            x: c.x.clone(),
            space: c.space.as_deref().map(FunctionSpace::parse).transpose()?,
            tau: c.tau,
            seed: c.seed,
            out_dir: c.out_dir.clone(),
            ..Default::default()
        };
        if c.t_min.is_some() || c.t_max.is_some() || c.nodes.is_some() {
            let d = GridParams::default();
            cfg.grid = Some(GridParams {
                t_min: c.t_min.unwrap_or(d.t_min),
                t_max: c.t_max.unwrap_or(d.t_max),
                n_nodes: c.nodes.unwrap_or(d.n_nodes),
            });
        }
        match cli.command.as_ref() {
            None => {}
            Some(Command::KProfile) => cfg.command = Some(CommandKind::KProfile),
            Some(Command::Evolve { t, steps }) => {
                cfg.command = Some(CommandKind::Evolve);
                cfg.horizon = *t;
                cfg.steps = *steps;
            }
            Some(Command::Verify { id, jobs, params }) => {
                cfg.command = Some(CommandKind::Verify);
                cfg.theorem = Some(id.clone());
                cfg.jobs = *jobs;
                cfg.horizon = params.horizon;
                cfg.h = params.h.clone();
                cfg.theta = params.theta;
                cfg.p = params.p;
                cfg.q = params.q.clone();
                cfg.samples = params.samples;
                cfg.epsilon = params.epsilon.clone();
                cfg.families = params
                    .families
                    .as_ref()
                    .map(|f| f.iter().map(|s| InitialData::parse(s)).collect::<Result<_>>())
                    .transpose()?;
                cfg.n = params.n;
                cfg.steps = params.steps;
            }
            Some(Command::Qlaplace { q, theta, p, family, n, horizon }) => {
                cfg.command = Some(CommandKind::Qlaplace);
                cfg.q = q.map(|q| vec![q]);
                cfg.theta = *theta;
                cfg.p = *p;
                cfg.families = family.as_deref().map(InitialData::parse).transpose()?.map(|f| vec![f]);
                cfg.n = *n;
                cfg.horizon = *horizon;
            }
            Some(Command::HardyNorm { trials }) => {
                cfg.command = Some(CommandKind::HardyNorm);
                cfg.trials = *trials;
            }
        }
        if let Some(path) = &c.config {
            let file = ExperimentConfig::from_json_file(path)?;
            cfg.overlay(&file)?;
        }
        cfg.grid.get_or_insert_with(GridParams::default);
        cfg.seed.get_or_insert(SuiteOptions::default().seed);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks of the numeric parameters; the checks themselves report violated
    /// mathematical preconditions such as `τω < 1` or `θ < 1/2`.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(v) if !(v > 0.0 && v.is_finite()) => {
                Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
            }
            _ => Ok(()),
        };
        positive("tau", self.tau)?;
        positive("horizon", self.horizon)?;
        if let Some(t) = self.theta {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Parameter(format!("theta must lie in (0,1), got {t}")));
            }
        }
        if let Some(p) = self.p {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::Parameter(format!("p must lie in [1,inf), got {p}")));
            }
        }
        if let Some(space) = &self.space {
            space.validate()?;
        }
        if let Some(g) = self.grid {
            LogGrid::from_params(g)?;
        }
        for (name, v) in [("steps", self.steps), ("jobs", self.jobs), ("n", self.n), ("trials", self.trials)] {
            if v == Some(0) {
                return Err(Error::Parameter(format!("{name} must be at least 1")));
            }
        }
        for q in self.q.iter().flatten() {
            if !(*q >= 2.0 && q.is_finite()) {
                return Err(Error::Parameter(format!("q must lie in [2,inf), got {q}")));
            }
        }
        for h in self.h.iter().flatten() {
            positive("h", Some(*h))?;
        }
        for e in self.epsilon.iter().flatten() {
            if !(*e > 0.0 && *e <= 1.0) {
                return Err(Error::Parameter(format!("epsilon must lie in (0,1], got {e}")));
            }
        }
        if let Some(id) = &self.theorem {
            if id != "all" && !is_theorem(id) {
                return Err(Error::Parameter(format!("unknown theorem id '{id}' (see --list)")));
            }
        }
        Ok(())
    }

    /// Output directory: the flag, then the environment, then [`DEFAULT_OUT`].
    pub fn output_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    fn grid(&self) -> Result<LogGrid> {
        LogGrid::from_params(self.grid.unwrap_or_default())
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(SuiteOptions::default().seed)
    }

    /// Options of the verification registry.
    pub fn suite_options(&self) -> SuiteOptions {
        SuiteOptions {
            seed: self.seed(),
            grid: self.grid.unwrap_or_default(),
            op: self.op.clone(),
            x: self.x.clone(),
            space: self.space,
            tau: self.tau,
            horizon: self.horizon,
            h: self.h.clone(),
            theta: self.theta,
            p: self.p,
            q: self.q.clone(),
            samples: self.samples.or(self.trials),
            epsilon: self.epsilon.clone(),
            families: self.families.clone(),
            n: self.n,
            steps: self.steps,
        }
    }

    fn require_op(&self) -> Result<OperatorConfig> {
        self.op
            .clone()
            .ok_or_else(|| Error::Parameter("this command needs --op".into()))
    }

    fn point(&self, op: &OperatorConfig) -> Result<Vec<f64>> {
        self.suite_options().point_for(op)
    }
}

/// Outcome of a run: whether every asserted check passed, and the files written.
#[derive(Debug)]
pub struct RunOutcome {
    pub passed: bool,
    pub artifacts: Vec<PathBuf>,
    /// Human-readable lines for standard output.
    pub lines: Vec<String>,
}

struct Writer {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    fn new(root: PathBuf) -> Result<Self> {
        fs::create_dir_all(&root)?;
        Ok(Writer {
            root,
            written: Vec::new(),
        })
    }

    fn path(&mut self, rel: impl AsRef<Path>) -> Result<PathBuf> {
        let p = self.root.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        self.written.push(p.clone());
        Ok(p)
    }

    fn json<T: Serialize>(&mut self, rel: impl AsRef<Path>, value: &T) -> Result<()> {
        let p = self.path(rel)?;
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        fs::write(p, s)?;
        Ok(())
    }

    fn bytes(&mut self, rel: impl AsRef<Path>, data: Vec<u8>) -> Result<()> {
        let p = self.path(rel)?;
        fs::write(p, data)?;
        Ok(())
    }
}

/// File-name form of an instance label.
pub fn slug(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c.is_ascii_alphanumeric() || c == '.' {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    body: T,
}

/// Runs the configured command and writes its artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let kind = cfg
        .command
        .ok_or_else(|| Error::Parameter("no command given (see --help)".into()))?;
    let mut w = Writer::new(cfg.output_dir())?;
    w.json("config.json", cfg)?;
    let mut lines = Vec::new();
    let passed = match kind {
        CommandKind::KProfile => run_k_profile(cfg, &mut w, &mut lines)?,
        CommandKind::Evolve => run_evolve(cfg, &mut w, &mut lines)?,
        CommandKind::Verify => run_verify(cfg, &mut w, &mut lines)?,
        CommandKind::Qlaplace => run_qlaplace(cfg, &mut w, &mut lines)?,
        CommandKind::HardyNorm => run_hardy(cfg, &mut w, &mut lines)?,
    };
    Ok(RunOutcome {
        passed,
        artifacts: w.written,
        lines,
    })
}

fn run_k_profile(cfg: &ExperimentConfig, w: &mut Writer, lines: &mut Vec<String>) -> Result<bool> {
    let op_cfg = cfg.require_op()?;
    let x = cfg.point(&op_cfg)?;
    let space = match cfg.space {
        Some(s) => s,
        None => FunctionSpace::weighted(cfg.theta.unwrap_or(0.5), cfg.p.unwrap_or(2.0))?,
    };
    let tau = cfg.tau.unwrap_or(1.0);
    let grid = cfg.grid()?;
    let couple = AccretiveCouple::new(op_cfg.build()?);
    let profile = k_profile(&couple, &x, &grid)?;
    let est = interp_from_profile(&profile, &space, tau)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["t", "K_over_t", "K_lower_over_t"])?;
    for (i, t) in grid.nodes().iter().enumerate() {
        let lower = profile.k_lower.as_ref().map_or(String::new(), |l| fmt_f64(l[i] / t));
        csv.write_record([fmt_f64(*t), fmt_f64(profile.k[i] / t), lower])?;
    }
    w.bytes("k_profile.csv", csv.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;

    #[derive(Serialize)]
    struct Body {
        space: String,
        tau: f64,
        method: String,
        n_tau_upper: f64,
        n_tau_lower: Option<f64>,
        finite: bool,
        quadrature_error: f64,
    }
    let body = Body {
        space: space.label(),
        tau,
        method: format!("{:?}", est.method),
        n_tau_upper: est.upper,
        n_tau_lower: est.lower,
        finite: est.finite,
        quadrature_error: est.quadrature_error,
    };
    lines.push(format!(
        "N_E^tau(x) in [{}, {}] on {} (tau = {tau}, K by {:?})",
        est.lower.map_or("?".into(), fmt_f64),
        fmt_f64(est.upper),
        space.label(),
        est.method
    ));
    w.json("k_profile.json", &Envelope { schema_version: SCHEMA_VERSION, config: cfg, body })?;
    Ok(true)
}

fn run_evolve(cfg: &ExperimentConfig, w: &mut Writer, lines: &mut Vec<String>) -> Result<bool> {
    let op_cfg = cfg.require_op()?;
    let x = cfg.point(&op_cfg)?;
    let op = op_cfg.build()?;
    let t = cfg.horizon.unwrap_or(1.0);
    let steps = cfg.steps.unwrap_or(1024);
    let traj = evolve(op.as_ref(), &x, t, steps)?;
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    w.bytes("trajectory.csv", buf)?;
    let summary = traj.summary(op.as_ref());
    lines.push(format!(
        "evolved to t = {t} in {steps} steps; refinement increments {:?}",
        summary.cauchy_increments
    ));
    w.json("trajectory.json", &Envelope { schema_version: SCHEMA_VERSION, config: cfg, body: summary })?;
    Ok(true)
}

#[derive(Serialize)]
struct SummaryEntry {
    theorem: String,
    instance: String,
    verdict: crate::harness::Verdict,
    rows: usize,
    violations: usize,
    file: String,
}

fn write_reports(w: &mut Writer, dir: &str, reports: &[TheoremReport]) -> Result<Vec<SummaryEntry>> {
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let file = format!("{dir}/{i:02}-{}.json", slug(&r.instance));
        w.json(&file, r)?;
        r.write_csv(&mut rows, i == 0)?;
        entries.push(SummaryEntry {
            theorem: r.theorem.clone(),
            instance: r.instance.clone(),
            verdict: r.verdict,
            rows: r.rows.len(),
            violations: r.violations(),
            file,
        });
    }
    if reports.is_empty() {
        let mut wr = csv::Writer::from_writer(&mut rows);
        wr.write_record(CSV_HEADER)?;
        wr.flush()?;
    }
    w.bytes(format!("{dir}/rows.csv"), rows)?;
    Ok(entries)
}

fn write_summary(w: &mut Writer, dir: &str, entries: &[SummaryEntry]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.write_record(["theorem", "instance", "verdict", "rows", "violations", "file"])?;
    for e in entries {
        let verdict = serde_json::to_value(e.verdict)?;
        wr.write_record([
            e.theorem.clone(),
            e.instance.clone(),
            verdict.as_str().unwrap_or_default().to_string(),
            e.rows.to_string(),
            e.violations.to_string(),
            e.file.clone(),
        ])?;
    }
    w.bytes(
        format!("{dir}/summary.csv"),
        wr.into_inner().map_err(|e| Error::Io(e.into_error()))?,
    )?;
    #[derive(Serialize)]
    struct Summary<'a> {
        schema_version: u32,
        passed: bool,
        reports: &'a [SummaryEntry],
    }
    let passed = entries.iter().all(|e| e.verdict == crate::harness::Verdict::Pass);
    w.json(format!("{dir}/summary.json"), &Summary { schema_version: SCHEMA_VERSION, passed, reports: entries })
}

fn run_verify(cfg: &ExperimentConfig, w: &mut Writer, lines: &mut Vec<String>) -> Result<bool> {
    let id = cfg
        .theorem
        .clone()
        .ok_or_else(|| Error::Parameter("verify needs a theorem id (see --list)".into()))?;
    let opts = cfg.suite_options();
    let ids: Vec<&str> = if id == "all" {
        THEOREMS.iter().map(|(t, _)| *t).collect()
    } else {
        vec![id.as_str()]
    };
    let jobs = cfg.jobs.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start {jobs} worker threads: {e}")))?;
    let results: Vec<Result<Vec<TheoremReport>>> =
        pool.install(|| ids.par_iter().map(|t| run_theorem(t, &opts)).collect());
    let mut entries = Vec::new();
    for (t, res) in ids.iter().zip(results) {
        let reports = res?;
        for r in &reports {
            lines.push(r.summary_line());
        }
        entries.extend(write_reports(w, &format!("verify/{t}"), &reports)?);
    }
    write_summary(w, "verify", &entries)?;
    let passed = entries.iter().all(|e| e.verdict == crate::harness::Verdict::Pass);
    lines.push(format!(
        "{} of {} reports pass",
        entries.iter().filter(|e| e.verdict == crate::harness::Verdict::Pass).count(),
        entries.len()
    ));
    Ok(passed)
}

fn run_qlaplace(cfg: &ExperimentConfig, w: &mut Writer, lines: &mut Vec<String>) -> Result<bool> {
    let (q0, n0) = match &cfg.op {
        Some(OperatorConfig::Qlaplace { q, n }) => (*q, *n),
        Some(other) => return Err(Error::Parameter(format!("qlaplace needs a qlaplace operator, got {}", other.label()))),
        None => (2.0, 64),
    };
    let q = cfg.q.as_ref().and_then(|v| v.first().copied()).unwrap_or(q0);
    let n = cfg.n.unwrap_or(n0);
    let theta = cfg.theta.unwrap_or(0.25);
    let p = cfg.p.unwrap_or(2.0);
    let horizon = cfg.horizon.unwrap_or(1.0);
    let family = cfg.families.as_ref().and_then(|f| f.first().copied()).unwrap_or(InitialData::Smooth);
    let (u0, label) = match &cfg.x {
        Some(x) => (x.clone(), "custom"),
        None => (family.sample(n), family.label()),
    };
    let rep = qlaplace_regularity(label, q, theta, p, &u0, horizon, &cfg.grid()?)?;
    lines.push(rep.summary_line());
    for (k, v) in &rep.constants {
        lines.push(format!("  {k:<28} {}", fmt_f64(*v)));
    }
    let dir = "qlaplace";
    let file = format!("{dir}/{}-q{q}-theta{theta}.json", slug(label));
    w.json(&file, &rep)?;
    let mut rows = Vec::new();
    rep.write_csv(&mut rows, true)?;
    w.bytes(format!("{dir}/rows.csv"), rows)?;
    Ok(rep.passed())
}

fn run_hardy(cfg: &ExperimentConfig, w: &mut Writer, lines: &mut Vec<String>) -> Result<bool> {
    let space = match cfg.space {
        Some(s) => s,
        None => FunctionSpace::weighted(cfg.theta.unwrap_or(0.5), cfg.p.unwrap_or(2.0))?,
    };
    let trials = cfg.trials.unwrap_or(24);
    let bound = space.hardy_bound()?;
    let estimate = hardy_norm_estimate(&space, trials)?;
    let passed = estimate <= bound * (1.0 + 1e-12);
    #[derive(Serialize)]
    struct Body {
        space: String,
        trials: usize,
        estimate: f64,
        bound: f64,
        ratio: f64,
        estimate_below_bound: bool,
    }
    lines.push(format!(
        "{}: ||P|| >= {} (bound {}, ratio {:.4})",
        space.label(),
        fmt_f64(estimate),
        fmt_f64(bound),
        estimate / bound
    ));
    let body = Body {
        space: space.label(),
        trials,
        estimate,
        bound,
        ratio: estimate / bound,
        estimate_below_bound: passed,
    };
    w.json("hardy_norm.json", &Envelope { schema_version: SCHEMA_VERSION, config: cfg, body })?;
    Ok(passed)
}

/// Text of `--list`.
pub fn list_text() -> String {
    let mut s = String::new();
    for (id, desc) in THEOREMS {
        s.push_str(&format!("{id:<20} {desc}\n"));
    }
    s.push_str(&format!("{:<20} every id above\n", "all"));
    s
}

/// Parses `args`, runs, prints, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    if cli.list {
        print!("{}", list_text());
        if cli.command.is_none() {
            return 0;
        }
    }
    let outcome = ExperimentConfig::from_cli(&cli).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(o) => {
            for l in &o.lines {
                println!("{l}");
            }
            if o.passed {
                0
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_accepts_string_or_object() {
        let a: ExperimentConfig = serde_json::from_str(r#"{"op": "qlaplace:q=3,n=8"}"#).unwrap();
        let b: ExperimentConfig = serde_json::from_str(r#"{"op": {"kind": "qlaplace", "q": 3, "n": 8}}"#).unwrap();
        assert_eq!(a.op, Some(OperatorConfig::Qlaplace { q: 3.0, n: 8 }));
        assert_eq!(a.op, b.op);
    }

    #[test]
    fn overlay_replaces_set_fields_only() {
        let mut base = ExperimentConfig {
            tau: Some(1.0),
            seed: Some(7),
            ..Default::default()
        };
        let file = ExperimentConfig {
            tau: Some(0.5),
            ..Default::default()
        };
        base.overlay(&file).unwrap();
        assert_eq!((base.tau, base.seed), (Some(0.5), Some(7)));
    }

    #[test]
    fn overlay_rejects_other_command() {
        let mut base = ExperimentConfig {
            command: Some(CommandKind::Evolve),
            ..Default::default()
        };
        let file = ExperimentConfig {
            command: Some(CommandKind::Verify),
            ..Default::default()
        };
        assert!(base.overlay(&file).is_err());
    }

    #[test]
    fn slug_examples() {
        assert_eq!(slug("qlaplace:q=2,n=64 dim=64"), "qlaplace-q-2-n-64-dim-64");
        assert_eq!(slug("E(theta=0.5,p=2)"), "E-theta-0.5-p-2");
    }
}
