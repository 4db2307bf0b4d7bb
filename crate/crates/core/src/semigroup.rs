//! Semigroups generated by `−A` through the exponential formula `S(t)x = lim (J_{t/n})ⁿ x`,
//! orbits on logarithmic time grids, variation functions of curves, and the
//! integral-solution and orbit-interpolation diagnostics.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::accretive::{
    domain_indicator, resolve, set_norm, AccretiveOperator, DomainStatus, OpRef,
};
use crate::error::{Error, Result};
use crate::grid::{fmt_f64, GridFunction, LogGrid};
use crate::interpolation::{k_function, AccretiveCouple};
use crate::normed::{default_lambda_seq, kato_bracket, NormedSpace};

/// How the states of a trajectory were produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Scheme {
    /// `n` equal implicit Euler steps over `[0, t]`.
    ExponentialFormula { n: usize },
    /// Implicit Euler between the nodes of a time grid with `substeps` equal steps per cell.
    LogTime { substeps: usize },
    /// Closed-form semigroup.
    Exact,
}

/// States `S(t_k)x₀` at increasing times starting at 0.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub op: String,
    pub x0: Vec<f64>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub scheme: Scheme,
    pub omega: f64,
    /// Sup-norm differences between successive refinements (`n→2n`, `2n→4n`).
    pub cauchy_increments: Vec<f64>,
}

/// Summary written next to a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectorySummary {
    pub op: String,
    pub scheme: Scheme,
    pub omega: f64,
    pub steps: usize,
    pub t_final: f64,
    /// `max_k ‖S(t_{k+1})x − S(t_k)x‖/(t_{k+1} − t_k)`.
    pub lipschitz_estimate: f64,
    /// `e^{ωt}|Ax₀|`, the Lipschitz bound for `x₀ ∈ dom A`.
    pub lipschitz_bound: f64,
    pub cauchy_increments: Vec<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has states")
    }

    pub fn summary(&self, op: &dyn AccretiveOperator) -> TrajectorySummary {
        let sp = op.space();
        let mut lip: f64 = 0.0;
        for k in 1..self.states.len() {
            let dt = self.times[k] - self.times[k - 1];
            lip = lip.max(sp.dist(&self.states[k], &self.states[k - 1]) / dt);
        }
        let t_final = *self.times.last().unwrap_or(&0.0);
        TrajectorySummary {
            op: self.op.clone(),
            scheme: self.scheme.clone(),
            omega: self.omega,
            steps: self.states.len() - 1,
            t_final,
            lipschitz_estimate: lip,
            lipschitz_bound: (self.omega * t_final).exp() * set_norm(op, &self.x0),
            cauchy_increments: self.cauchy_increments.clone(),
        }
    }

    /// CSV with columns `t, x0, x1, ...`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let dim = self.x0.len();
        let mut header = vec!["t".to_string()];
        header.extend((0..dim).map(|i| format!("x{i}")));
        wr.write_record(&header)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut rec = vec![fmt_f64(*t)];
            rec.extend(s.iter().map(|v| fmt_f64(*v)));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn check_start(op: &dyn AccretiveOperator, x0: &[f64]) -> Result<()> {
    op.space().check_dim(x0)?;
    if domain_indicator(op, x0) == DomainStatus::Outside {
        return Err(Error::Precondition(
            "initial value must lie in the closure of the domain".into(),
        ));
    }
    Ok(())
}

/// `k ↦ (J_{t/n})^k x₀` for `k = 0..=n`.
fn euler_run(op: &dyn AccretiveOperator, x0: &[f64], t: f64, n: usize) -> Result<Vec<Vec<f64>>> {
    let dt = t / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(x0.to_vec());
    for k in 0..n {
        let next = resolve(op, dt, &out[k]).map_err(|e| match e {
            Error::Solver {
                message,
                residual,
                iterations,
            } => Error::Solver {
                message: format!("{message} at step {}", k + 1),
                residual,
                iterations,
            },
            other => other,
        })?;
        out.push(next);
    }
    Ok(out)
}

fn sup_dist(sp: &NormedSpace, coarse: &[Vec<f64>], fine: &[Vec<f64>]) -> f64 {
    let r = (fine.len() - 1) / (coarse.len() - 1);
    coarse
        .iter()
        .enumerate()
        .map(|(k, c)| sp.dist(c, &fine[k * r]))
        .fold(0.0, f64::max)
}

/// Evolves `x₀` to time `t` with `n` steps of the exponential formula. Runs with `2n`
/// and `4n` steps are computed alongside and their sup-norm differences recorded.
pub fn evolve(op: &dyn AccretiveOperator, x0: &[f64], t: f64, n_steps: usize) -> Result<Trajectory> {
    evolve_with(op, x0, t, n_steps, true)
}

/// As [`evolve`], optionally skipping the refinement runs.
pub fn evolve_with(
    op: &dyn AccretiveOperator,
    x0: &[f64],
    t: f64,
    n_steps: usize,
    refine: bool,
) -> Result<Trajectory> {
    check_start(op, x0)?;
    if !(t > 0.0 && t.is_finite()) || n_steps == 0 {
        return Err(Error::Parameter(format!("evolve needs t > 0 and n >= 1, got {t}, {n_steps}")));
    }
    if (t / n_steps as f64) * op.omega() >= 1.0 {
        return Err(Error::Parameter(format!(
            "step t/n = {} violates (t/n)*omega < 1",
            t / n_steps as f64
        )));
    }
    let runs: Vec<Vec<Vec<f64>>> = if refine {
        [1usize, 2, 4]
            .par_iter()
            .map(|m| euler_run(op, x0, t, m * n_steps))
            .collect::<Result<_>>()?
    } else {
        vec![euler_run(op, x0, t, n_steps)?]
    };
    let sp = op.space();
    let cauchy = runs
        .windows(2)
        .map(|w| sup_dist(sp, &w[0], &w[1]))
        .collect();
    let dt = t / n_steps as f64;
    let times = (0..=n_steps).map(|k| k as f64 * dt).collect();
    Ok(Trajectory {
        op: op.name(),
        x0: x0.to_vec(),
        times,
        states: runs.into_iter().next().expect("at least one run"),
        scheme: Scheme::ExponentialFormula { n: n_steps },
        omega: op.omega(),
        cauchy_increments: cauchy,
    })
}

/// States on positive increasing `times` together with an error estimate per node.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Difference between the runs with `m` and `2m` substeps (zero for exact orbits).
    pub errors: Vec<f64>,
    pub scheme: Scheme,
}

fn log_time_run(
    op: &dyn AccretiveOperator,
    x0: &[f64],
    times: &[f64],
    m: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(times.len());
    let mut x = x0.to_vec();
    let mut prev = 0.0;
    for &t in times {
        let dt = (t - prev) / m as f64;
        for _ in 0..m {
            x = resolve(op, dt, &x)?;
        }
        out.push(x.clone());
        prev = t;
    }
    Ok(out)
}

/// `S(t)x₀` at every time in `times`: closed form when the operator has one, implicit
/// Euler with `substeps` steps per cell otherwise.
pub fn orbit(
    op: &dyn AccretiveOperator,
    x0: &[f64],
    times: &[f64],
    substeps: usize,
) -> Result<Orbit> {
    check_start(op, x0)?;
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("orbit times must be positive and increasing".into()));
    }
    if let Some(exact) = times
        .iter()
        .map(|&t| op.exact_semigroup(t, x0))
        .collect::<Option<Vec<_>>>()
    {
        return Ok(Orbit {
            times: times.to_vec(),
            errors: vec![0.0; times.len()],
            states: exact,
            scheme: Scheme::Exact,
        });
    }
    let m = substeps.max(1);
    let (coarse, fine) = rayon::join(
        || log_time_run(op, x0, times, m),
        || log_time_run(op, x0, times, 2 * m),
    );
    let (coarse, fine) = (coarse?, fine?);
    let sp = op.space();
    let errors = coarse.iter().zip(&fine).map(|(a, b)| sp.dist(a, b)).collect();
    Ok(Orbit {
        times: times.to_vec(),
        states: fine,
        errors,
        scheme: Scheme::LogTime { substeps: 2 * m },
    })
}

/// Where a variation profile comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurveSource {
    ResolventCurve,
    SemigroupOrbit,
    Other,
}

/// `t ↦ Var_f(t)` on the nodes of a grid, with its derivative.
#[derive(Clone, Debug)]
pub struct VariationProfile {
    pub source: CurveSource,
    pub grid: LogGrid,
    /// Nondecreasing partition sums `Var_f(t_i)`, starting from `f(0)`.
    pub var_values: Vec<f64>,
    /// Centered difference quotients of the variation (one-sided at the ends).
    pub derivative: GridFunction,
    /// Dyadic refinement level reached.
    pub level: usize,
    /// Whether the last refinement changed the total by less than `1e-10` relative.
    pub converged: bool,
}

/// Deepest dyadic refinement of the grid cells.
const MAX_VARIATION_LEVEL: usize = 4;

/// Variation of `curve` on `[0, t_i]` for every node of `grid`, where `curve(0)` is the
/// starting point. Each grid cell is split dyadically until the total partition sum
/// grows by less than `1e-10` relative.
pub fn variation_profile(
    curve: &(dyn Fn(f64) -> Result<Vec<f64>> + Sync),
    space: &NormedSpace,
    grid: &LogGrid,
    source: CurveSource,
) -> Result<VariationProfile> {
    let nodes = grid.nodes();
    let n = nodes.len();
    let start = curve(0.0)?;
    let at_nodes: Vec<Vec<f64>> = nodes.par_iter().map(|&t| curve(t)).collect::<Result<_>>()?;
    // cell i spans [t_{i-1}, t_i] (cell 0 spans [0, t_0])
    let left = |i: usize| if i == 0 { 0.0 } else { nodes[i - 1] };
    let mut cells: Vec<f64> = (0..n)
        .map(|i| {
            let a = if i == 0 { &start } else { &at_nodes[i - 1] };
            space.dist(a, &at_nodes[i])
        })
        .collect();
    let mut level = 0;
    let mut converged = false;
    let mut total: f64 = cells.iter().sum();
    while level < MAX_VARIATION_LEVEL {
        level += 1;
        let parts = 1usize << level;
        let refined: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let (a, b) = (left(i), nodes[i]);
                let mut prev = if i == 0 { start.clone() } else { at_nodes[i - 1].clone() };
                let mut s = 0.0;
                for k in 1..=parts {
                    let p = if k == parts {
                        at_nodes[i].clone()
                    } else {
                        curve(a + (b - a) * k as f64 / parts as f64)?
                    };
                    s += space.dist(&prev, &p);
                    prev = p;
                }
                Ok(s)
            })
            .collect::<Result<_>>()?;
        // partition sums can only grow under refinement
        let refined: Vec<f64> = refined.iter().zip(&cells).map(|(r, c)| r.max(*c)).collect();
        let new_total: f64 = refined.iter().sum();
        let grew = new_total - total;
        cells = refined;
        total = new_total;
        if grew <= 1e-10 * total.max(1e-300) {
            converged = true;
            break;
        }
    }
    let mut var_values = Vec::with_capacity(n);
    let mut acc = 0.0;
    for c in &cells {
        acc += c;
        var_values.push(acc);
    }
    let derivative = difference_quotients(nodes, &var_values);
    Ok(VariationProfile {
        source,
        grid: grid.clone(),
        var_values,
        derivative: GridFunction::new(grid.clone(), derivative)?,
        level,
        converged,
    })
}

/// Centered nonuniform difference quotients, one-sided at the ends.
pub fn difference_quotients(t: &[f64], v: &[f64]) -> Vec<f64> {
    let n = t.len();
    (0..n)
        .map(|i| {
            let d = if n < 2 {
                0.0
            } else if i == 0 {
                (v[1] - v[0]) / (t[1] - t[0])
            } else if i == n - 1 {
                (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2])
            } else {
                let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
                let (s1, s2) = ((v[i] - v[i - 1]) / h1, (v[i + 1] - v[i]) / h2);
                (h2 * s1 + h1 * s2) / (h1 + h2)
            };
            d.max(0.0)
        })
        .collect()
}

/// Pairs `(x̂, f̂) ∈ A` realized as `(J_λ u, A_λ u)`.
pub fn graph_samples(
    op: &dyn AccretiveOperator,
    points: &[Vec<f64>],
    lambdas: &[f64],
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let mut out = Vec::new();
    for u in points {
        for &l in lambdas {
            let j = resolve(op, l, u)?;
            let f = u.iter().zip(&j).map(|(a, b)| (a - b) / l).collect();
            out.push((j, f));
        }
    }
    Ok(out)
}

/// Worst violation of the integral-solution inequality over all time pairs.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralSolutionReport {
    pub samples: usize,
    pub pairs: usize,
    /// `max (lhs − rhs)` over samples and pairs `s < t`.
    pub worst_violation: f64,
    /// Slack `5·dt·(1+‖f̂‖)` at the worst pair.
    pub slack: f64,
    /// Samples whose Kato bracket sequences were not monotone.
    pub non_monotone_brackets: usize,
    pub pass: bool,
}

/// Checks `‖u(t)−x̂‖ ≤ ‖u(s)−x̂‖ + ∫ₛᵗ[u−x̂, −f̂] + ω∫ₛᵗ‖u−x̂‖` along a trajectory with
/// trapezoidal quadrature in time.
pub fn integral_solution_check(
    op: &dyn AccretiveOperator,
    traj: &Trajectory,
    samples: &[(Vec<f64>, Vec<f64>)],
) -> Result<IntegralSolutionReport> {
    let sp = op.space();
    let omega = op.omega();
    let times = &traj.times;
    let n = times.len();
    let dt_max = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let seq = default_lambda_seq();
    let per_sample: Vec<(f64, f64, usize, bool)> = samples
        .par_iter()
        .map(|(xh, fh)| {
            let neg_f: Vec<f64> = fh.iter().map(|v| -v).collect();
            let slack = 5.0 * dt_max * (1.0 + sp.norm(fh));
            let mut dist = Vec::with_capacity(n);
            let mut integrand = Vec::with_capacity(n);
            let mut monotone = true;
            for u in &traj.states {
                let d = crate::linalg::sub(u, xh);
                let nd = sp.norm(&d);
                let b = kato_bracket(sp, &d, &neg_f, &seq);
                monotone &= b.monotone;
                dist.push(nd);
                integrand.push(b.value + omega * nd);
            }
            // cumulative trapezoid C_k = ∫_0^{t_k}
            let mut cum = vec![0.0; n];
            for k in 1..n {
                cum[k] = cum[k - 1] + 0.5 * (times[k] - times[k - 1]) * (integrand[k] + integrand[k - 1]);
            }
            // max over s<t of dist_t − dist_s − (C_t − C_s) = max_t (dist_t − C_t) − min_{s<t}(dist_s − C_s)
            let mut worst = f64::NEG_INFINITY;
            let mut best_s = dist[0] - cum[0];
            for k in 1..n {
                worst = worst.max((dist[k] - cum[k]) - best_s);
                best_s = best_s.min(dist[k] - cum[k]);
            }
            (worst, slack, n * (n - 1) / 2, monotone)
        })
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut slack = 0.0;
    let mut pass = true;
    let mut pairs = 0;
    let mut bad = 0;
    for (w, s, p, m) in per_sample {
        pairs += p;
        if !m {
            bad += 1;
        }
        if w > s {
            pass = false;
        }
        if w - s > worst - slack || worst == f64::NEG_INFINITY {
            worst = w;
            slack = s;
        }
    }
    Ok(IntegralSolutionReport {
        samples: samples.len(),
        pairs,
        worst_violation: worst.max(0.0),
        slack,
        non_monotone_brackets: bad,
        pass,
    })
}

/// One node of the orbit interpolation check.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitNode {
    pub t: f64,
    /// `sup_s ‖S(s)x₀ − S(s)J_t x₀‖ + t·e^{ωT}|A J_t x₀|`.
    pub witness: f64,
    /// `e^{ωT}·2‖x₀ − J_t x₀‖`.
    pub resolvent_bound: f64,
    /// `e^{ωT}·2(2−tω)/(1−tω)·K_lower(x₀,t)`, when a lower bound for `K` is available.
    pub k_bound: Option<f64>,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitInterpolationReport {
    pub horizon: f64,
    pub nodes: Vec<OrbitNode>,
    pub pass: bool,
}

/// Bounds the `(C, Lip)` K-functional of the orbit `S(·)x₀` on `[0, T]` through the
/// witness `S(·)J_t x₀` and compares it with the resolvent and `K^A` bounds at sampled
/// nodes `t < τ` of `grid`.
pub fn orbit_interpolation_check(
    op_ref: &OpRef,
    x0: &[f64],
    horizon: f64,
    tau: f64,
    grid: &LogGrid,
    n_steps: usize,
    stride: usize,
) -> Result<OrbitInterpolationReport> {
    let op = op_ref.as_ref();
    check_start(op, x0)?;
    let omega = op.omega();
    if tau * omega >= 1.0 {
        return Err(Error::Parameter(format!("requires tau*omega < 1, got {}", tau * omega)));
    }
    let sp = op.space();
    let growth = (omega * horizon).exp();
    let base = evolve(op, x0, horizon, n_steps)?;
    let couple = AccretiveCouple::new(op_ref.clone());
    let ts: Vec<f64> = grid
        .nodes()
        .iter()
        .copied()
        .filter(|&t| t < tau)
        .step_by(stride.max(1))
        .collect();
    let nodes: Vec<OrbitNode> = ts
        .par_iter()
        .map(|&t| -> Result<OrbitNode> {
            let jx = resolve(op, t, x0)?;
            let other = evolve(op, &jx, horizon, n_steps)?;
            let sup = base
                .states
                .iter()
                .zip(&other.states)
                .map(|(a, b)| sp.dist(a, b))
                .fold(0.0, f64::max);
            let witness = sup + t * growth * set_norm(op, &jx);
            let resolvent_bound = growth * 2.0 * sp.dist(x0, &jx);
            let k = k_function(&couple, x0, t)?;
            let k_bound = k
                .lower
                .map(|l| growth * 2.0 * (2.0 - t * omega) / (1.0 - t * omega) * l);
            let slack = 10.0
                * (base.cauchy_increments.iter().sum::<f64>()
                    + other.cauchy_increments.iter().sum::<f64>())
                + 1e-10 * (1.0 + resolvent_bound);
            let pass = witness <= resolvent_bound + slack
                && k_bound.is_none_or(|b| witness <= b + slack);
            Ok(OrbitNode {
                t,
                witness,
                resolvent_bound,
                k_bound,
                slack,
                pass,
            })
        })
        .collect::<Result<_>>()?;
    let pass = nodes.iter().all(|n| n.pass);
    Ok(OrbitInterpolationReport {
        horizon,
        nodes,
        pass,
    })
}
