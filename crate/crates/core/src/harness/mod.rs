//! Nodewise verification of the two-sided estimates on shipped operator instances.
//!
//! Every check returns [`TheoremReport`]s; [`run_theorem`] runs the default instance
//! family of a check id (or a single user instance) with a deterministic report order.

mod chains;
mod common;
mod domains;
mod misc;
mod regularity;
mod report;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accretive::{
    Domination, LipschitzMap, MatrixOperator, OperatorConfig, SinReaction, ZeroMap,
};
use crate::error::{Error, Result};
use crate::grid::{GridParams, LogGrid};
use crate::normed::NormedSpace;
use crate::spaces::FunctionSpace;

pub use chains::{check_norm_equivalence, check_pointwise, ORBIT_SUBSTEPS};
pub use common::{random_smooth_vector, seeded_rng};
pub use domains::{check_domain_chain, check_perturbation};
pub use misc::{check_exponential_formula, check_hardy, check_mean_k};
pub use regularity::{
    check_holder, check_linear_regularizing, check_regularizing, check_subgradient,
    dirichlet_laplacian_matrix, exponent_map, linear_sup, qlaplace_regularity,
    qlaplace_regularity_sweep, t_a_exp_norm, InitialData,
};
pub use report::{ChainSummary, Row, TheoremReport, Verdict, CSV_HEADER, SCHEMA_VERSION};

/// Check ids with a one-line description, in the order `verify all` runs them.
pub const THEOREMS: &[(&str, &str)] = &[
    ("pointwise", "K(x,t)/t against resolvent, variation and orbit at every node t < tau"),
    ("norm-equivalence", "E-norms over (0,tau) of resolvent, variation, orbit, mean and trace quantities against N_E^tau"),
    ("domain-chain", "interpolation sets of A and I+hA coincide; N^tau of both are comparable"),
    ("holder", "orbit displacement bound and fitted Hoelder exponent"),
    ("perturbation", "affine bound and set agreement for A+B with dominated Lipschitz B"),
    ("regularizing", "|AS(t)x| <= K/t and two-sided norm chain for regularizing semigroups"),
    ("subgradient", "two-sided chain for the couple (norm, sqrt of the energy) on the squared space"),
    ("qlaplace-regularity", "q-Laplace flow: finiteness of the speed norm against the interpolation function"),
    ("mean-k", "step-function mean construction against N_E^tau on random 1-D instances"),
    ("hardy", "Hardy operator norm estimate against 1/theta and the image of an indicator"),
    ("crandall-liggett", "exponential formula against closed-form flows"),
];

/// Whether `id` names a check.
pub fn is_theorem(id: &str) -> bool {
    THEOREMS.iter().any(|(t, _)| *t == id)
}

/// Parameters of a verification run. `None` fields select the defaults of the check;
/// setting `op` replaces the default instance family by that single operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteOptions {
    pub seed: u64,
    pub grid: GridParams,
    pub op: Option<OperatorConfig>,
    pub x: Option<Vec<f64>>,
    pub space: Option<FunctionSpace>,
    pub tau: Option<f64>,
    /// Final time of orbits (holder, qlaplace, crandall-liggett).
    pub horizon: Option<f64>,
    /// Shifts `h` of `I + hA` (domain-chain).
    pub h: Option<Vec<f64>>,
    /// Overrides `theta` of the default weighted space.
    pub theta: Option<f64>,
    pub p: Option<f64>,
    /// Exponents of the q-Laplace sweep.
    pub q: Option<Vec<f64>>,
    /// Number of random samples (perturbation, mean-k) or trial functions (hardy).
    pub samples: Option<usize>,
    pub epsilon: Option<Vec<f64>>,
    /// Initial data families of the q-Laplace sweep.
    pub families: Option<Vec<InitialData>>,
    /// Mesh size of the q-Laplace sweep.
    pub n: Option<usize>,
    /// Implicit Euler steps (crandall-liggett).
    pub steps: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 7,
            grid: GridParams::default(),
            op: None,
            x: None,
            space: None,
            tau: None,
            horizon: None,
            h: None,
            theta: None,
            p: None,
            q: None,
            samples: None,
            epsilon: None,
            families: None,
            n: None,
            steps: None,
        }
    }
}

impl SuiteOptions {
    /// The weighted space with the `theta`/`p` overrides applied to `E(theta0, p0)`.
    fn space_or(&self, theta0: f64, p0: f64) -> Result<FunctionSpace> {
        match self.space {
            Some(s) if self.theta.is_none() && self.p.is_none() => Ok(s),
            Some(s) => {
                let (t, p) = s.theta_p().unwrap_or((theta0, p0));
                FunctionSpace::weighted(self.theta.unwrap_or(t), self.p.unwrap_or(p))
            }
            None => FunctionSpace::weighted(self.theta.unwrap_or(theta0), self.p.unwrap_or(p0)),
        }
    }

    /// Starting point for `cfg`: the `x` option, `1` in one dimension, otherwise a smooth
    /// random vector from the seed.
    pub fn point_for(&self, cfg: &OperatorConfig) -> Result<Vec<f64>> {
        if let Some(x) = &self.x {
            return Ok(x.clone());
        }
        let d = dim_of(cfg)?;
        Ok(if d == 1 { vec![1.0] } else { random_smooth_vector(d, self.seed) })
    }
}

fn dim_of(cfg: &OperatorConfig) -> Result<usize> {
    match cfg.dim() {
        Some(d) => Ok(d),
        None => Ok(cfg.build()?.space().dim),
    }
}

type Job = Box<dyn Fn() -> Result<Vec<TheoremReport>> + Send + Sync>;

fn one(r: Result<TheoremReport>) -> Result<Vec<TheoremReport>> {
    r.map(|r| vec![r])
}

fn cfg(s: &str) -> OperatorConfig {
    OperatorConfig::parse(s).expect("shipped instance parses")
}

fn instance_label(cfg: &OperatorConfig, x: &[f64]) -> String {
    if x.len() == 1 {
        format!("{} x={}", cfg.label(), x[0])
    } else {
        format!("{} dim={}", cfg.label(), x.len())
    }
}

/// Operators with their starting points: the `op` option or the given defaults.
fn instances(opts: &SuiteOptions, defaults: &[(&str, Option<Vec<f64>>)]) -> Result<Vec<(OperatorConfig, Vec<f64>)>> {
    if let Some(op) = &opts.op {
        return Ok(vec![(op.clone(), opts.point_for(op)?)]);
    }
    defaults
        .iter()
        .map(|(s, x)| {
            let c = cfg(s);
            let x = match (&opts.x, x) {
                (Some(x), _) => x.clone(),
                (None, Some(x)) => x.clone(),
                (None, None) => opts.point_for(&c)?,
            };
            Ok((c, x))
        })
        .collect()
}

/// Jobs for `id`, in report order.
fn jobs(id: &str, opts: &SuiteOptions) -> Result<Vec<Job>> {
    let grid = LogGrid::from_params(opts.grid)?;
    let mut out: Vec<Job> = Vec::new();
    match id {
        "pointwise" => {
            let tau = opts.tau.unwrap_or(1.0);
            for (c, x) in instances(opts, &[("scalar:a=1", None), ("qlaplace:q=2,n=64", None), ("qlaplace:q=3,n=64", None)])? {
                let g = grid.clone();
                out.push(Box::new(move || {
                    one(check_pointwise(&instance_label(&c, &x), &c.build()?, &x, tau, &g))
                }));
            }
        }
        "norm-equivalence" => {
            let tau = opts.tau.unwrap_or(0.5);
            let space = opts.space_or(0.5, 2.0)?;
            for (c, x) in instances(
                opts,
                &[("scalar:a=1", None), ("scalar:a=0,omega=1", None), ("qlaplace:q=2,n=64", None)],
            )? {
                let g = grid.clone();
                out.push(Box::new(move || {
                    one(check_norm_equivalence(&instance_label(&c, &x), &c.build()?, &x, &space, tau, &g))
                }));
            }
        }
        "domain-chain" => {
            let tau = opts.tau.unwrap_or(1.0);
            let space = opts.space_or(0.5, 2.0)?;
            let hs = opts.h.clone().unwrap_or_else(|| vec![0.1, 0.5]);
            let defaults: Vec<(OperatorConfig, Vec<Vec<f64>>)> = match &opts.op {
                Some(op) => {
                    let x = opts.point_for(op)?;
                    vec![(op.clone(), vec![x])]
                }
                None => vec![
                    (
                        cfg("energy:energy=indicator,k=1"),
                        [0.3, -0.9, 1.0, 1.5, -2.0].iter().map(|v| vec![*v]).collect(),
                    ),
                    (cfg("scalar:a=1"), vec![vec![1.0], vec![-2.0], vec![0.0]]),
                    (cfg("energy:energy=abs,k=1"), vec![vec![0.5], vec![-3.0]]),
                ],
            };
            for (c, samples) in defaults {
                let g = grid.clone();
                let hs = hs.clone();
                out.push(Box::new(move || {
                    let label = format!("{} samples={}", c.label(), samples.len());
                    one(check_domain_chain(&label, &c.build()?, &hs, &space, tau, &samples, &g))
                }));
            }
        }
        "holder" => {
            let thetas = match opts.theta {
                Some(t) => vec![t],
                None => vec![0.25, 0.4],
            };
            let p = opts.p.unwrap_or(2.0);
            let inst: Vec<(OperatorConfig, Vec<f64>, f64, f64)> = match &opts.op {
                Some(op) => vec![(op.clone(), opts.point_for(op)?, opts.tau.unwrap_or(0.1), opts.horizon.unwrap_or(0.5))],
                None => vec![
                    (cfg("scalar:a=1"), vec![1.0], opts.tau.unwrap_or(0.1), opts.horizon.unwrap_or(0.5)),
                    (
                        cfg("qlaplace:q=2,n=64"),
                        opts.x.clone().unwrap_or_else(|| InitialData::Hat.sample(64)),
                        opts.tau.unwrap_or(0.1),
                        opts.horizon.unwrap_or(0.5),
                    ),
                ],
            };
            for (c, x, tau, horizon) in inst {
                for &theta in &thetas {
                    let space = FunctionSpace::weighted(theta, p)?;
                    let g = grid.clone();
                    let c = c.clone();
                    let x = x.clone();
                    out.push(Box::new(move || {
                        one(check_holder(&format!("{} theta={theta}", instance_label(&c, &x)), &c.build()?, &x, &space, tau, horizon, &g))
                    }));
                }
            }
        }
        "perturbation" => {
            let tau = opts.tau.unwrap_or(1.0);
            let space = opts.space_or(0.5, 2.0)?;
            let count = opts.samples.unwrap_or(20);
            let seed = opts.seed;
            let sin: Arc<dyn LipschitzMap> = Arc::new(SinReaction { c: 0.3 });
            let zero: Arc<dyn LipschitzMap> = Arc::new(ZeroMap);
            let bases: Vec<OperatorConfig> = match &opts.op {
                Some(op) => vec![op.clone()],
                None => vec![cfg("scalar:a=1"), cfg("qlaplace:q=2,n=16")],
            };
            for c in bases {
                // |c sin v| <= c|v| = c/a |Av| for A = a·id, and <= c‖v‖ in general
                let pairs = [
                    (zero.clone(), Domination::new(0.5, 0.0, 0.0)?),
                    (sin.clone(), Domination::new(0.5, 0.0, 0.3)?),
                ];
                for (map, dom) in pairs {
                    let g = grid.clone();
                    let c = c.clone();
                    out.push(Box::new(move || {
                        let d = dim_of(&c)?;
                        let samples = perturbation_samples(d, count, seed);
                        let label = format!("{} + {} samples={count}", c.label(), map.name());
                        one(check_perturbation(&label, &c.build()?, map.clone(), dom, &space, tau, &samples, &g))
                    }));
                }
            }
        }
        "regularizing" => {
            let tau = opts.tau.unwrap_or(1.0);
            let space = opts.space_or(0.5, 2.0)?;
            let linear = match &opts.op {
                Some(op) => op.matrix_operator()?.map(|m| (op.label(), m)),
                None => {
                    let n = 16;
                    let m = MatrixOperator::new(dirichlet_laplacian_matrix(n), 0.0, NormedSpace::euclidean(n))?;
                    Some((format!("dirichlet-laplacian(n={n})"), m))
                }
            };
            let nonlinear = match (&opts.op, &linear) {
                (Some(_), Some(_)) => Vec::new(),
                _ => instances(
                    opts,
                    &[
                        ("energy:energy=quadratic,k=1", Some(vec![1.0])),
                        ("energy:energy=abs,k=1", Some(vec![2.0])),
                        ("qlaplace:q=3,n=32", None),
                    ],
                )?,
            };
            for (c, x) in nonlinear {
                let g = grid.clone();
                out.push(Box::new(move || {
                    one(check_regularizing(&instance_label(&c, &x), &c.build()?, &x, &space, tau, &g))
                }));
            }
            if let Some((label, m)) = linear {
                let g = grid.clone();
                let m = Arc::new(m);
                out.push(Box::new(move || one(check_linear_regularizing(&label, &m, tau, &g))));
            }
        }
        "subgradient" => {
            let tau = opts.tau.unwrap_or(1.0);
            let space = opts.space_or(0.25, 2.0)?;
            for (c, x) in instances(
                opts,
                &[
                    ("energy:energy=quadratic,k=1", Some(vec![1.0])),
                    ("qlaplace:q=2,n=64", None),
                    ("qlaplace:q=3,n=32", None),
                ],
            )? {
                let energy = c.energy()?.ok_or_else(|| {
                    Error::Parameter(format!("subgradient needs an energy operator, got {}", c.label()))
                })?;
                let g = grid.clone();
                out.push(Box::new(move || {
                    one(check_subgradient(&instance_label(&c, &x), energy.clone(), &x, &space, tau, &g))
                }));
            }
        }
        "qlaplace-regularity" => {
            let qs: Vec<f64> = match (&opts.q, &opts.op) {
                (Some(q), _) => q.clone(),
                (None, Some(OperatorConfig::Qlaplace { q, .. })) => vec![*q],
                (None, Some(other)) => {
                    return Err(Error::Parameter(format!("qlaplace needs a qlaplace operator, got {}", other.label())))
                }
                (None, None) => vec![2.0, 3.0, 4.0],
            };
            let n = match &opts.op {
                Some(OperatorConfig::Qlaplace { n, .. }) => *n,
                _ => opts.n.unwrap_or(64),
            };
            let thetas = match opts.theta {
                Some(t) => vec![t],
                None => vec![0.25, 0.4],
            };
            let p = opts.p.unwrap_or(2.0);
            let horizon = opts.horizon.unwrap_or(1.0);
            let families = opts.families.clone().unwrap_or_else(|| InitialData::FAMILIES.to_vec());
            for &q in &qs {
                for &fam in &families {
                    let g = grid.clone();
                    let thetas = thetas.clone();
                    let u0 = opts.x.clone().unwrap_or_else(|| fam.sample(n));
                    let label = if opts.x.is_some() { "custom" } else { fam.label() };
                    out.push(Box::new(move || qlaplace_regularity_sweep(label, q, &thetas, p, &u0, horizon, &g)));
                }
            }
        }
        "mean-k" => {
            let tau = opts.tau.unwrap_or(1.0);
            let space = opts.space_or(0.5, 2.0)?;
            let count = opts.samples.unwrap_or(20);
            let eps = opts.epsilon.clone().unwrap_or_else(|| vec![0.5, 0.1, 0.01]);
            let seed = opts.seed;
            out.push(Box::new(move || check_mean_k(seed, count, &eps, &space, tau, &grid)));
        }
        "hardy" => {
            let tau = opts.tau.unwrap_or(1.0);
            let trials = opts.samples.unwrap_or(24);
            let spaces = match (opts.space, opts.theta) {
                (None, None) => vec![FunctionSpace::weighted(0.5, 2.0)?, FunctionSpace::weighted(0.25, 3.0)?],
                _ => vec![opts.space_or(0.5, 2.0)?],
            };
            for space in spaces {
                let g = grid.clone();
                out.push(Box::new(move || one(check_hardy(&space, trials, tau, &g))));
            }
        }
        "crandall-liggett" => {
            let t = opts.horizon.unwrap_or(1.0);
            let steps = opts.steps.unwrap_or(1 << 16);
            for (c, x) in instances(opts, &[("scalar:a=1", None), ("qlaplace:q=2,n=64", None)])? {
                out.push(Box::new(move || {
                    let op = c.build()?;
                    one(check_exponential_formula(&instance_label(&c, &x), op.as_ref(), &x, t, steps, 1e-4))
                }));
            }
        }
        other => {
            return Err(Error::Parameter(format!(
                "unknown theorem id '{other}' (see --list)"
            )))
        }
    }
    Ok(out)
}

/// Seeded starting points for the perturbation check: `U(−3,3)` in one dimension,
/// smooth random vectors of amplitude up to 3 otherwise.
fn perturbation_samples(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|i| {
            if dim == 1 {
                vec![rng.gen_range(-3.0..3.0)]
            } else {
                let s: f64 = rng.gen_range(0.0..3.0);
                random_smooth_vector(dim, seed.wrapping_add(i as u64 + 1))
                    .into_iter()
                    .map(|v| s * v)
                    .collect()
            }
        })
        .collect()
}

/// Runs check `id` on its instance family. Instances run in parallel; reports come back
/// in a fixed order, so identical options give identical reports.
pub fn run_theorem(id: &str, opts: &SuiteOptions) -> Result<Vec<TheoremReport>> {
    let jobs = jobs(id, opts)?;
    let parts: Vec<Vec<TheoremReport>> = jobs.par_iter().map(|j| j()).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}
