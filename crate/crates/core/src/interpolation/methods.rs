//! Interpolation functions built from K-profiles, the mean-method step construction,
//! the trace-method objective along the resolvent curve, and the transfer of
//! interpolation bounds through maps between couples.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    best_of, branch_and_bound, k_profile_with, Couple, KMethod, KOptions, KProfile,
};
use crate::accretive::{resolve, set_norm, AccretiveOperator};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, LogGrid};
use crate::spaces::{
    disjoint_sum, embedding_witness, inverse_tail_norm, probe_norm, quadrature_error, FunctionSpace,
};

fn check_tau(grid: &LogGrid, tau: f64) -> Result<()> {
    if !(tau > grid.t_min() && tau <= grid.t_max()) {
        return Err(Error::Parameter(format!(
            "tau = {tau} must lie in the grid range ({}, {}]",
            grid.t_min(),
            grid.t_max()
        )));
    }
    Ok(())
}

/// Index of the first node `>= tau`.
fn cover_index(grid: &LogGrid, tau: f64) -> usize {
    let nodes = grid.nodes();
    nodes
        .iter()
        .position(|&t| t >= tau * (1.0 - 1e-14))
        .unwrap_or(nodes.len() - 1)
}

/// Values on the nodes `0..=m`, zero beyond, as a linear grid function.
fn padded(grid: &LogGrid, head: Vec<f64>) -> Result<GridFunction> {
    let mut v = head;
    v.resize(grid.len(), 0.0);
    GridFunction::new(grid.clone(), v)
}

/// Two-sided estimate of `‖t ↦ K(x,t)/t · χ_{(0,τ)}‖_E`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpEstimate {
    pub tau: f64,
    /// Norm computed from the upper bounds of `K`.
    pub upper: f64,
    /// Norm computed from certified lower bounds of `K`, when available.
    pub lower: Option<f64>,
    /// Finiteness verdict of the upper value.
    pub finite: bool,
    pub quadrature_error: f64,
    pub method: KMethod,
}

/// Interpolation estimate from an existing profile.
pub fn interp_from_profile(profile: &KProfile, space: &FunctionSpace, tau: f64) -> Result<InterpEstimate> {
    check_tau(&profile.grid, tau)?;
    let up = profile.k_over_t();
    let probe = probe_norm(space, &up, 0.0, tau)?;
    let lower = match profile.lower_over_t() {
        Some(l) => Some(space.norm_window(&l, 0.0, tau)?),
        None => None,
    };
    Ok(InterpEstimate {
        tau,
        upper: probe.value,
        lower,
        finite: probe.finite,
        quadrature_error: quadrature_error(space, &up, 0.0, tau)?,
        method: profile.method,
    })
}

/// Bounds for `N_E^τ(x)` on `grid`.
pub fn interp_bounds(
    couple: &dyn Couple,
    x: &[f64],
    space: &FunctionSpace,
    tau: f64,
    grid: &LogGrid,
) -> Result<InterpEstimate> {
    check_tau(grid, tau)?;
    let profile = k_profile_with(couple, x, grid, &[], &KOptions::default())?;
    interp_from_profile(&profile, space, tau)
}

/// `N_E^τ(x) = ‖t ↦ K(x,t)/t · χ_{(0,τ)}‖_E`, computed from upper bounds of `K`.
pub fn interp_function_tau(
    couple: &dyn Couple,
    x: &[f64],
    space: &FunctionSpace,
    tau: f64,
    grid: &LogGrid,
) -> Result<f64> {
    Ok(interp_bounds(couple, x, space, tau, grid)?.upper)
}

/// The chain `N^τ ≤ N ≤ N^τ + N₀(x−v₀)·‖χ_{(τ,∞)}/t‖` for a couple with `N₁(v₀) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    pub tau: f64,
    pub truncated: f64,
    /// Grid value of `N_E(x)` plus the exact tail beyond `t_max` of `N₀(x−v₀)/t`.
    pub full: f64,
    /// `N^τ + N₀(x−v₀)·‖χ_{(τ,∞)}/t‖`.
    pub bound: f64,
    pub n0_offset: f64,
    pub tail_on_grid: f64,
    pub tail_beyond: f64,
    pub left_holds: bool,
    pub right_holds: bool,
}

/// Checks the relation between the truncated and the full interpolation function.
/// `v0` must satisfy `N₁(v₀) = 0` and `N₀(x−v₀) < ∞`.
pub fn k_vs_full_relation(
    couple: &dyn Couple,
    x: &[f64],
    v0: &[f64],
    space: &FunctionSpace,
    tau: f64,
    grid: &LogGrid,
) -> Result<RelationReport> {
    check_tau(grid, tau)?;
    couple.space().check_dim(v0)?;
    let n1 = couple.n1(v0);
    if !(n1.abs() <= 1e-12) {
        return Err(Error::Hypothesis(format!("N1(v0) = 0 fails: N1(v0) = {n1:e}")));
    }
    let n0_offset = couple.n0(&crate::linalg::sub(x, v0));
    for (label, z) in [("x", x), ("v0", v0)] {
        if !couple.n0(z).is_finite() {
            return Err(Error::Hypothesis(format!("N0 finite everywhere fails at {label}")));
        }
    }
    let (tail_on_grid, tail_beyond) = inverse_tail_norm(space, grid, tau)?;
    if !tail_beyond.is_finite() {
        return Err(Error::Hypothesis(format!(
            "chi_(tau,inf)/t has infinite norm in {}",
            space.label()
        )));
    }
    let profile = k_profile_with(couple, x, grid, &[v0.to_vec()], &KOptions::default())?;
    let f = profile.k_over_t();
    let truncated = space.norm_window(&f, 0.0, tau)?;
    let on_grid = space.norm(&f)?;
    let full = disjoint_sum(space, on_grid, n0_offset * tail_beyond);
    let tail = disjoint_sum(space, tail_on_grid, tail_beyond);
    let bound = truncated + n0_offset * tail;
    let tol = 1e-12 * bound.max(1e-300);
    Ok(RelationReport {
        tau,
        truncated,
        full,
        bound,
        n0_offset,
        tail_on_grid,
        tail_beyond,
        left_holds: truncated <= full + tol,
        right_holds: full <= bound + tol,
    })
}

/// Result of the step-function construction `u(t) = v_n` on `(t_{n+1}, t_n]`,
/// `t_n = (1+ε)^{-n}`.
#[derive(Clone, Debug, Serialize)]
pub struct MeanMethodReport {
    pub epsilon: f64,
    pub tau: f64,
    /// `‖N₀(x−u(t))/t·χ‖ + ‖N₁(u(t))·χ‖`.
    pub value: f64,
    pub n0_part: f64,
    pub n1_part: f64,
    /// `N_E^τ(x)` from upper bounds of `K` (the pool contains every `v_n`).
    pub n_tau: f64,
    pub n_tau_lower: Option<f64>,
    /// `‖min{1, 1/t²}‖_E`.
    pub witness_norm: f64,
    /// `2(1+ε)(N_E^τ + ε‖min{1,1/t²}‖_E)`.
    pub upper_bound: f64,
    /// Whether every `v_n` is certified to be within `ε·min{t_n, 1/t_n}` of optimal.
    pub certified: bool,
    pub cells: usize,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// Nodes `t_i ≤ τ` (plus the first node beyond) and the witness `u(t_i)`.
    #[serde(skip)]
    pub nodes: Vec<f64>,
    #[serde(skip)]
    pub witness: Vec<Vec<f64>>,
}

/// Near-minimizer of `N₀(x−v) + t N₁(v)` within `tol`, and whether that is certified.
fn near_minimizer(
    couple: &dyn Couple,
    x: &[f64],
    t: f64,
    tol: f64,
) -> Result<(Vec<f64>, bool)> {
    let mut pool = vec![x.to_vec(), vec![0.0; x.len()]];
    pool.extend(couple.candidates(x, t)?);
    if let Some(c) = couple.certificate(x, t) {
        if let Some(a) = c.argmin.clone() {
            pool.push(a);
        }
        let (best, i) = best_of(couple, x, &pool, t);
        let ok = c.lower.is_some_and(|l| best - l <= tol);
        return Ok((pool.swap_remove(i), ok || best == 0.0));
    }
    let (best, i) = best_of(couple, x, &pool, t);
    if best == 0.0 {
        return Ok((pool.swap_remove(i), true));
    }
    let opts = KOptions {
        rel_tol: (0.5 * tol / best).max(1e-15),
        max_evaluations: 400_000,
        ..KOptions::default()
    };
    if best.is_finite() {
        if let Some(r) = branch_and_bound(couple, x, t, best, &pool[i], &opts) {
            let ok = r.upper - r.lower <= tol;
            let v = if r.upper < best { r.argmin } else { pool.swap_remove(i) };
            return Ok((v, ok));
        }
    }
    Ok((pool.swap_remove(i), false))
}

/// Evaluates the mean-method construction for `N^{L⁰,τ}` on `grid`.
pub fn mean_method_tau(
    couple: &dyn Couple,
    x: &[f64],
    space: &FunctionSpace,
    tau: f64,
    epsilon: f64,
    grid: &LogGrid,
) -> Result<MeanMethodReport> {
    check_tau(grid, tau)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Parameter(format!("epsilon must lie in (0,1], got {epsilon}")));
    }
    couple.space().check_dim(x)?;
    let m = cover_index(grid, tau);
    let nodes = &grid.nodes()[..=m];
    let ln = (1.0 + epsilon).ln();
    // t ∈ (t_{n+1}, t_n]  ⇔  n = floor(−ln t / ln(1+ε)), up to rounding at the endpoints
    let cell = |t: f64| (-t.ln() / ln + 1e-9).floor() as i64;
    let (n_hi, n_lo) = (cell(nodes[0]), cell(nodes[m]));
    let results: Vec<(Vec<f64>, bool)> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            let tn = (1.0 + epsilon).powi(-(n as i32));
            near_minimizer(couple, x, tn, epsilon * tn.min(1.0 / tn))
        })
        .collect::<Result<_>>()?;
    let certified = results.iter().all(|r| r.1);
    let witness: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&t| results[(cell(t) - n_lo) as usize].0.clone())
        .collect();
    let n0_vals: Vec<f64> = nodes
        .iter()
        .zip(&witness)
        .map(|(t, v)| couple.n0(&crate::linalg::sub(x, v)) / t)
        .collect();
    let n1_vals: Vec<f64> = witness.iter().map(|v| couple.n1(v)).collect();
    let n0_part = space.norm_window(&padded(grid, n0_vals)?, 0.0, tau)?;
    let n1_part = space.norm_window(&padded(grid, n1_vals)?, 0.0, tau)?;
    let value = n0_part + n1_part;

    let extra: Vec<Vec<f64>> = results.into_iter().map(|r| r.0).collect();
    let cells = extra.len();
    let profile = k_profile_with(couple, x, grid, &extra, &KOptions::default())?;
    let n_tau = space.norm_window(&profile.k_over_t(), 0.0, tau)?;
    let n_tau_lower = match profile.lower_over_t() {
        Some(l) => Some(space.norm_window(&l, 0.0, tau)?),
        None => None,
    };
    let witness_norm = space.norm(&embedding_witness(grid))?;
    let upper_bound = 2.0 * (1.0 + epsilon) * (n_tau + epsilon * witness_norm);
    let rel = 1e-12;
    Ok(MeanMethodReport {
        epsilon,
        tau,
        value,
        n0_part,
        n1_part,
        n_tau,
        n_tau_lower,
        witness_norm,
        upper_bound,
        certified,
        cells,
        lower_holds: n_tau <= value * (1.0 + rel) + 1e-300,
        upper_holds: value <= upper_bound * (1.0 + rel),
        nodes: nodes.to_vec(),
        witness,
    })
}

/// Trace-method objective along `w(λ) = J_λ x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    pub tau: f64,
    /// `‖‖ẇ(λ)‖χ‖ + ‖|Aw(λ)|χ‖`, an upper bound for the trace-method value.
    pub trace_value: f64,
    pub derivative_part: f64,
    pub set_norm_part: f64,
    /// `R = ‖λ ↦ ‖x−J_λx‖/λ · χ_{(0,τ)}‖_E`.
    pub resolvent_norm: f64,
    /// `2/(1−τω)`.
    pub factor: f64,
    /// Mean-method cost of `w`: `R + ‖|Aw(λ)|χ‖`.
    pub mean_cost: f64,
    /// Analytic bound for the averaging operator on `E`.
    pub hardy_bound: f64,
    /// Discretization slack for the finite-difference derivative.
    pub slack: f64,
    /// `trace ≤ 2/(1−τω)·R`.
    pub bound_holds: bool,
    /// `mean cost ≤ ‖P‖·trace`.
    pub mean_holds: bool,
}

/// Evaluates the trace objective on `w(λ) = J_λ x` with centered differences in `λ`,
/// checking it against the resolvent norm and the mean-method cost of the same curve.
pub fn trace_method_upper(
    op: &dyn AccretiveOperator,
    x: &[f64],
    space: &FunctionSpace,
    tau: f64,
    grid: &LogGrid,
) -> Result<TraceReport> {
    check_tau(grid, tau)?;
    let omega = op.omega();
    if tau * omega >= 1.0 {
        return Err(Error::Parameter(format!(
            "trace method needs tau*omega < 1, got {tau}*{omega} >= 1"
        )));
    }
    let sp = op.space();
    sp.check_dim(x)?;
    let m = cover_index(grid, tau);
    let all = grid.nodes();
    let last = (m + 2).min(all.len() - 1);
    let lam: Vec<f64> = all[..=last]
        .iter()
        .copied()
        .take_while(|l| l * omega < 1.0)
        .collect();
    let w: Vec<Vec<f64>> = lam
        .par_iter()
        .map(|&l| resolve(op, l, x))
        .collect::<Result<_>>()?;
    let k = lam.len();
    let slope = |i: usize, j: usize| -> Vec<f64> {
        let h = lam[j] - lam[i];
        w[j].iter().zip(&w[i]).map(|(b, a)| (b - a) / h).collect()
    };
    let centered = |i: usize, s: usize| -> Option<Vec<f64>> {
        if i < s || i + s >= k {
            return None;
        }
        let (h1, h2) = (lam[i] - lam[i - s], lam[i + s] - lam[i]);
        let (s1, s2) = (slope(i - s, i), slope(i, i + s));
        Some(
            s1.iter()
                .zip(&s2)
                .map(|(a, b)| (h2 * a + h1 * b) / (h1 + h2))
                .collect(),
        )
    };
    let mut deriv = Vec::with_capacity(k);
    let mut err = Vec::with_capacity(k);
    for i in 0..k {
        let d = centered(i, 1).unwrap_or_else(|| {
            if i + 1 < k {
                slope(i, i + 1)
            } else {
                slope(i - 1, i)
            }
        });
        let e = match centered(i, 2) {
            Some(d2) => sp.dist(&d, &d2) / 3.0,
            None => {
                // one-sided values: compare with the neighbouring centered value
                let j = if i < 2 { 2.min(k - 1) } else { k.saturating_sub(3) };
                centered(j, 1).map_or(0.0, |dj| sp.dist(&d, &dj))
            }
        };
        deriv.push(sp.norm(&d));
        err.push(e);
    }
    let yos: Vec<f64> = lam
        .iter()
        .zip(&w)
        .map(|(l, j)| sp.dist(x, j) / l)
        .collect();
    let sn: Vec<f64> = w.iter().map(|j| set_norm(op, j)).collect();
    let derivative_part = space.norm_window(&padded(grid, deriv)?, 0.0, tau)?;
    let set_norm_part = space.norm_window(&padded(grid, sn)?, 0.0, tau)?;
    let resolvent_norm = space.norm_window(&padded(grid, yos)?, 0.0, tau)?;
    let deriv_err = space.norm_window(&padded(grid, err)?, 0.0, tau)?;
    let trace_value = derivative_part + set_norm_part;
    let factor = 2.0 / (1.0 - tau * omega);
    let hardy_bound = space.hardy_bound()?;
    let mean_cost = resolvent_norm + set_norm_part;
    let slack = 10.0 * deriv_err + 1e-10 * (1.0 + trace_value);
    Ok(TraceReport {
        tau,
        trace_value,
        derivative_part,
        set_norm_part,
        resolvent_norm,
        factor,
        mean_cost,
        hardy_bound,
        slack,
        bound_holds: trace_value <= factor * resolvent_norm + slack,
        mean_holds: mean_cost <= hardy_bound * (trace_value + slack),
    })
}

/// One sample of the interpolation theorem check.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremSample {
    pub x: Vec<f64>,
    /// Mean-method cost of `Tx` along the pushed-forward witness `T∘u`.
    pub lhs: f64,
    /// `ã·(mean-method cost of x along u) + b̃(x)`.
    pub rhs: f64,
    pub b_tilde: f64,
    pub ratio: f64,
    /// Hypothesis violations found at sampled pairs; the verdict is withheld when nonempty.
    pub violations: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpolationTheoremReport {
    pub tau: f64,
    pub l: f64,
    pub a: f64,
    pub a_tilde: f64,
    pub samples: Vec<TheoremSample>,
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Checks `M^τ_E(Tx) ≤ ã·N^τ_E(x) + b̃(x)` with `ã = max{L, a}` on each sample, for a map
/// `T` with `M₀(Tx−Ty) ≤ L N₀(x−y)` and `M₁(Tx) ≤ a N₁(x) + b(‖x‖)`. Both sides are
/// evaluated along the mean-method witness `u` of `x` (with `ε = 0.1`) and its image.
#[allow(clippy::too_many_arguments)]
pub fn interpolation_theorem_check(
    t_map: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    couple_x: &dyn Couple,
    couple_y: &dyn Couple,
    l: f64,
    a: f64,
    b: &(dyn Fn(f64) -> f64 + Sync),
    space: &FunctionSpace,
    tau: f64,
    samples: &[Vec<f64>],
    grid: &LogGrid,
) -> Result<InterpolationTheoremReport> {
    if !(l >= 0.0 && a > 0.0) {
        return Err(Error::Parameter(format!("need L >= 0 and a > 0, got {l}, {a}")));
    }
    let a_tilde = l.max(a);
    let rel = 1e-9;
    let mut out = Vec::with_capacity(samples.len());
    for x in samples {
        let mm = mean_method_tau(couple_x, x, space, tau, 0.1, grid)?;
        let tx = t_map(x);
        let mut violations = Vec::new();
        let mut lhs0 = Vec::with_capacity(mm.nodes.len());
        let mut lhs1 = Vec::with_capacity(mm.nodes.len());
        let mut bvals = Vec::with_capacity(mm.nodes.len());
        let mut checked: Vec<&Vec<f64>> = Vec::new();
        for (t, u) in mm.nodes.iter().zip(&mm.witness) {
            let tu = t_map(u);
            let m0 = couple_y.n0(&crate::linalg::sub(&tx, &tu));
            let m1 = couple_y.n1(&tu);
            let bu = b(couple_x.space().norm(u));
            if checked.last().is_none_or(|c| *c != u) {
                checked.push(u);
                let n0 = couple_x.n0(&crate::linalg::sub(x, u));
                if m0 > l * n0 * (1.0 + rel) + 1e-14 {
                    violations.push(format!("M0(Tx-Tu) = {m0:e} > L*N0(x-u) = {:e}", l * n0));
                }
                let n1 = couple_x.n1(u);
                if m1 > (a * n1 + bu) * (1.0 + rel) + 1e-14 {
                    violations.push(format!("M1(Tu) = {m1:e} > a*N1(u)+b = {:e}", a * n1 + bu));
                }
            }
            lhs0.push(m0 / t);
            lhs1.push(m1);
            bvals.push(bu);
        }
        let lhs = space.norm_window(&padded(grid, lhs0)?, 0.0, tau)?
            + space.norm_window(&padded(grid, lhs1)?, 0.0, tau)?;
        let b_tilde = space.norm_window(&padded(grid, bvals)?, 0.0, tau)?;
        let rhs = a_tilde * mm.value + b_tilde;
        let ratio = if rhs > 0.0 { lhs / rhs } else if lhs > 0.0 { f64::INFINITY } else { 0.0 };
        let pass = violations.is_empty() && lhs <= rhs * (1.0 + rel) + 1e-300;
        out.push(TheoremSample {
            x: x.clone(),
            lhs,
            rhs,
            b_tilde,
            ratio,
            violations,
            pass,
        });
    }
    let worst_ratio = out.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let pass = out.iter().all(|s| s.pass);
    Ok(InterpolationTheoremReport {
        tau,
        l,
        a,
        a_tilde,
        samples: out,
        worst_ratio,
        pass,
    })
}
