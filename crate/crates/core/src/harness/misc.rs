//! Mean-method construction against `N_E^τ`, the Hardy operator norm, and convergence
//! of the exponential formula against closed-form flows.

use rand::Rng;

use crate::accretive::{AccretiveOperator, OperatorConfig};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, LogGrid};
use crate::interpolation::{mean_method_tau, AccretiveCouple};
use crate::semigroup::evolve_with;
use crate::spaces::{hardy_apply, hardy_norm_estimate, FunctionSpace};

use super::common::*;
use super::report::TheoremReport;

/// The step-function construction on `count` random one-dimensional instances
/// (`scalar:a` or `energy:abs,k=a` with `a ~ U(0.1, 5)`, `x ~ U(−3, 3)`) for each `ε`:
///
/// * `N_E^τ(x) ≤ value` (row `lower`)
/// * `value ≤ 2(1+ε)(N_E^τ(x) + ε‖min{1,1/t²}‖_E)` (row `upper`, with the certified
///   lower bound of `K` in `N_E^τ` when one exists)
/// * every step value is a certified near-minimizer (row `certified`)
///
/// Rows are indexed by `node_t = instance index`.
pub fn check_mean_k(
    seed: u64,
    count: usize,
    epsilons: &[f64],
    space: &FunctionSpace,
    tau: f64,
    grid: &LogGrid,
) -> Result<Vec<TheoremReport>> {
    space.validate()?;
    require_tau_on_grid(grid, tau)?;
    let mut rng = seeded_rng(seed);
    let instances: Vec<(OperatorConfig, f64)> = (0..count)
        .map(|i| {
            let a = rng.gen_range(0.1..5.0);
            let x = rng.gen_range(-3.0..3.0);
            let cfg = if i % 2 == 0 {
                OperatorConfig::Scalar { a, omega: 0.0 }
            } else {
                OperatorConfig::Energy {
                    energy: "abs".into(),
                    k: a,
                }
            };
            (cfg, x)
        })
        .collect();
    let mut out = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let mut rep = TheoremReport::new("mean-k", format!("random-1d(seed={seed},count={count},eps={eps})"));
        rep.constant("epsilon", eps);
        rep.constant("tau", tau);
        rep.constant("factor", 2.0 * (1.0 + eps));
        for (i, (cfg, x)) in instances.iter().enumerate() {
            let couple = AccretiveCouple::new(cfg.build()?);
            let m = mean_method_tau(&couple, &[*x], space, tau, eps, grid)?;
            let idx = i as f64;
            let round = |a: f64, b: f64| ROUNDING * (a.abs() + b.abs());
            rep.push("lower", idx, m.n_tau, m.value, 1.0, round(m.n_tau, m.value), true);
            let n_low = m.n_tau_lower.unwrap_or(m.n_tau);
            let bound = 2.0 * (1.0 + eps) * (n_low + eps * m.witness_norm);
            rep.push(
                "upper",
                idx,
                m.value,
                bound,
                2.0 * (1.0 + eps),
                round(m.value, bound),
                m.n_tau_lower.is_some(),
            );
            rep.push_flag("certified", idx, m.certified);
            rep.note(format!("instance {i}: {} x={x}", cfg.label()));
        }
        out.push(rep.finish());
    }
    Ok(out)
}

/// The Hardy operator on a weighted `Lᵖ` space:
///
/// * the trial-function estimate of `‖P‖` stays below the analytic bound `1/θ`
/// * it reaches `0.95/θ`
/// * `P(χ_{(0,τ)})(t) = min{1, τ/t}` to `1e-9` on every node, for `τ` on the grid
pub fn check_hardy(space: &FunctionSpace, trials: usize, tau: f64, grid: &LogGrid) -> Result<TheoremReport> {
    space.validate()?;
    let bound = space.hardy_bound()?;
    let node = grid.nodes()[grid.nearest_index(tau)];
    if (node - tau).abs() > 1e-12 * tau {
        return Err(Error::Parameter(format!("tau = {tau} must be a grid node for the image check")));
    }
    let estimate = hardy_norm_estimate(space, trials)?;
    let mut rep = TheoremReport::new("hardy", format!("{}(trials={trials})", space.label()));
    rep.constant("bound", bound);
    rep.constant("estimate", estimate);
    rep.constant("tau", tau);
    rep.push("estimate-below-bound", 0.0, estimate, bound, 1.0, ROUNDING * bound, true);
    rep.push("estimate-near-bound", 0.0, 0.95 * bound, estimate, 0.95, 0.0, true);

    let f = GridFunction::indicator_below(grid, tau);
    let pf = hardy_apply(&f)?;
    for (&t, &v) in grid.nodes().iter().zip(pf.values()) {
        let exact = (1.0f64).min(tau / t);
        rep.push("image", t, (v - exact).abs(), 0.0, 1.0, 1e-9, true);
    }
    Ok(rep.finish())
}

/// Exponential formula with `steps` equal implicit Euler steps on `[0, t]` against the
/// closed-form flow of `op`: the row `final` compares the states at time `t` and `path`
/// compares every 1/16 of the interval, both to `tol`.
pub fn check_exponential_formula(
    instance: &str,
    op: &dyn AccretiveOperator,
    x: &[f64],
    t: f64,
    steps: usize,
    tol: f64,
) -> Result<TheoremReport> {
    let traj = evolve_with(op, x, t, steps, false)?;
    let sp = op.space();
    let mut rep = TheoremReport::new("crandall-liggett", instance);
    rep.constant("t", t);
    rep.constant("steps", steps as f64);
    rep.constant("tolerance", tol);
    let stride = (steps / 16).max(1);
    let mut max_err: f64 = 0.0;
    for k in (stride..=steps).step_by(stride) {
        let tk = traj.times[k];
        let exact = op
            .exact_semigroup(tk, x)
            .ok_or_else(|| Error::Parameter(format!("{} has no closed-form flow", op.name())))?;
        let err = sp.dist(&traj.states[k], &exact);
        max_err = max_err.max(err);
        let chain = if k == steps { "final" } else { "path" };
        rep.push(chain, tk, err, tol, 1.0, 0.0, true);
    }
    rep.constant("max_error", max_err);
    Ok(rep.finish())
}
