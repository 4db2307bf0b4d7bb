//! Ingredients shared by the checks: node selection, resolvent paths with error bounds,
//! K-profiles split into the sides a chain may use, and seeded sample data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::accretive::{domain_indicator, resolve, resolvent_residual, AccretiveOperator, DomainStatus};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, LogGrid};
use crate::interpolation::KProfile;
use crate::spaces::{quadrature_error, FunctionSpace};

/// Relative slack for rounding in closed-form rows.
pub(crate) const ROUNDING: f64 = 1e-12;

/// Multiplier of every numerical error estimate in a slack budget.
pub(crate) const SLACK_FACTOR: f64 = 10.0;

pub(crate) fn require_tau_omega(tau: f64, omega: f64) -> Result<()> {
    if !(tau > 0.0) {
        return Err(Error::Parameter(format!("tau must be positive, got {tau}")));
    }
    if tau * omega >= 1.0 {
        return Err(Error::Precondition(format!(
            "requires τω < 1 (tau*omega = {tau}*{omega} = {})",
            tau * omega
        )));
    }
    Ok(())
}

pub(crate) fn require_closure(op: &dyn AccretiveOperator, x: &[f64]) -> Result<()> {
    op.space().check_dim(x)?;
    if domain_indicator(op, x) == DomainStatus::Outside {
        return Err(Error::Precondition(
            "requires x in the closure of the domain".into(),
        ));
    }
    Ok(())
}

pub(crate) fn require_tau_on_grid(grid: &LogGrid, tau: f64) -> Result<()> {
    if !(tau > grid.t_min() && tau <= grid.t_max()) {
        return Err(Error::Parameter(format!(
            "tau = {tau} must lie in the grid range ({}, {}]",
            grid.t_min(),
            grid.t_max()
        )));
    }
    Ok(())
}

/// Index of the first node `>= tau`: norms over `(0, τ)` need the values up to it.
pub(crate) fn cover_index(grid: &LogGrid, tau: f64) -> usize {
    let nodes = grid.nodes();
    nodes
        .iter()
        .position(|&t| t >= tau * (1.0 - 1e-14))
        .unwrap_or(nodes.len() - 1)
}

/// Values on the first nodes of `grid`, continued by the last value. Callers only
/// integrate up to the last node of `head`; the continuation keeps the every-second-node
/// comparison of [`quadrature_error`] free of an artificial jump there.
pub(crate) fn padded(grid: &LogGrid, head: &[f64]) -> Result<GridFunction> {
    let mut v = head.to_vec();
    v.resize(grid.len(), head.last().copied().unwrap_or(0.0));
    GridFunction::new(grid.clone(), v)
}

/// Norm of a head of values over `(lo, hi)` with its quadrature error estimate.
pub(crate) fn windowed(
    space: &FunctionSpace,
    grid: &LogGrid,
    head: &[f64],
    lo: f64,
    hi: f64,
) -> Result<(f64, f64)> {
    let f = padded(grid, head)?;
    Ok((space.norm_window(&f, lo, hi)?, quadrature_error(space, &f, lo, hi)?))
}

/// `J_t x` on the nodes `ts` with `‖x − J_t x‖` and a bound on its error.
pub(crate) struct ResolventPath {
    pub states: Vec<Vec<f64>>,
    pub dist: Vec<f64>,
    /// `ρ/(1−tω)` for the residual `ρ`: the distance of the computed point to `J_t x`.
    pub error: Vec<f64>,
}

pub(crate) fn resolvent_path(op: &dyn AccretiveOperator, x: &[f64], ts: &[f64]) -> Result<ResolventPath> {
    let sp = op.space();
    let omega = op.omega();
    let states: Vec<Vec<f64>> = ts.par_iter().map(|&t| resolve(op, t, x)).collect::<Result<_>>()?;
    let dist = states.iter().map(|j| sp.dist(x, j)).collect();
    let error = ts
        .iter()
        .zip(&states)
        .map(|(&t, j)| {
            let r = resolvent_residual(op, t, x, j);
            // a nonsmooth section can miss the computed point entirely; fall back to
            // rounding scale when the residual is not finite
            let r = if r.is_finite() { r } else { 1e-12 * (1.0 + sp.norm(x)) };
            r / (1.0 - t * omega)
        })
        .collect();
    Ok(ResolventPath {
        states,
        dist,
        error,
    })
}

/// Nodes `t < τ` with `tω < 1`, followed by the covering node when admissible.
pub(crate) fn chain_nodes(grid: &LogGrid, tau: f64, omega: f64) -> (Vec<f64>, usize) {
    let m = cover_index(grid, tau);
    let ts: Vec<f64> = grid.nodes()[..=m]
        .iter()
        .copied()
        .take_while(|t| t * omega < 1.0)
        .collect();
    let below = ts.iter().filter(|&&t| t < tau).count();
    (ts, below)
}

/// Upper and lower sides of a K-profile on its first `n` nodes; the lower side falls
/// back to the upper bound (uncertified) when no certificate exists.
pub(crate) struct KSides {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub certified: bool,
}

pub(crate) fn k_sides(profile: &KProfile, n: usize) -> KSides {
    let upper = profile.k[..n].to_vec();
    match &profile.k_lower {
        Some(l) => KSides {
            upper,
            lower: l[..n].to_vec(),
            certified: true,
        },
        None => KSides {
            lower: upper.clone(),
            upper,
            certified: false,
        },
    }
}

pub(crate) const UNCERTIFIED_NOTE: &str =
    "no certified lower bound for K on this instance: chains needing one use the upper bound and are marked uncertified";

/// Error estimate for centered differences of `values` on `ts`: the gap to the
/// stride-2 centered difference, copied from the nearest interior node at the ends.
pub(crate) fn derivative_error(ts: &[f64], values: &[f64], derivative: &[f64]) -> Vec<f64> {
    let n = ts.len();
    let mut err = vec![f64::NAN; n];
    for i in 2..n.saturating_sub(2) {
        let d2 = (values[i + 2] - values[i - 2]) / (ts[i + 2] - ts[i - 2]);
        err[i] = (derivative[i] - d2).abs();
    }
    let first = (2..n.saturating_sub(2)).next();
    let last = (2..n.saturating_sub(2)).last();
    for i in 0..n {
        if err[i].is_nan() {
            let j = if i < 2 { first } else { last };
            err[i] = j.map_or(0.0, |j| {
                err[j].max((derivative[i] - derivative[j]).abs())
            });
        }
    }
    err
}

/// Cumulative trapezoid `∫₀^{t_i} g` with `g(0)=0`, and an error estimate from the rule on
/// every second node.
pub(crate) fn cumulative_integral(ts: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = ts.len();
    let mut fine = vec![0.0; n];
    for i in 0..n {
        let (t0, g0, acc) = if i == 0 { (0.0, 0.0, 0.0) } else { (ts[i - 1], g[i - 1], fine[i - 1]) };
        fine[i] = acc + 0.5 * (ts[i] - t0) * (g[i] + g0);
    }
    let mut coarse = vec![0.0; n];
    coarse[0] = fine[0];
    let mut i = 2;
    while i < n {
        coarse[i] = coarse[i - 2] + 0.5 * (ts[i] - ts[i - 2]) * (g[i] + g[i - 2]);
        i += 2;
    }
    let mut err = vec![0.0; n];
    for i in 0..n {
        err[i] = if i % 2 == 0 {
            (fine[i] - coarse[i]).abs()
        } else {
            let a = (fine[i - 1] - coarse[i - 1]).abs();
            let b = if i + 1 < n { (fine[i + 1] - coarse[i + 1]).abs() } else { a };
            a.max(b)
        };
    }
    (fine, err)
}

/// Seeded generator used for every random sample.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A smooth random grid vector on `n` interior mesh points: sine modes `1..=8` with
/// uniform coefficients in `[-1, 1]` scaled by `1/k`.
pub fn random_smooth_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded_rng(seed);
    let coeffs: Vec<f64> = (1..=8)
        .map(|k| rng.gen_range(-1.0..1.0) / k as f64)
        .collect();
    let h = 1.0 / (n + 1) as f64;
    (1..=n)
        .map(|j| {
            let x = j as f64 * h;
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * x).sin())
                .sum()
        })
        .collect()
}
