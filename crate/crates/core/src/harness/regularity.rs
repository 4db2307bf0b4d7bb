//! Regularizing semigroups, Hölder continuity of orbits, the square-root energy couple of
//! a subgradient, and the parabolic q-Laplace regularity experiment.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accretive::{
    domain_indicator, q_laplace, set_norm, AccretiveOperator, DomainStatus, Energy, MatrixOperator,
    OpRef, SubgradientOperator,
};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, LogGrid};
use crate::interpolation::{k_profile, AccretiveCouple, SqrtEnergyCouple};
use crate::normed::NormedSpace;
use crate::semigroup::{orbit, Orbit};
use crate::spaces::{gamma, probe_norm, quadrature_error, square_space, FunctionSpace};

use super::chains::ORBIT_SUBSTEPS;
use super::common::*;
use super::report::TheoremReport;

/// Orbit on the nodes of `sub` with `|AS(t)x|` and an error estimate for it.
struct SetNormOrbit {
    orbit: Orbit,
    set_norms: Vec<f64>,
    set_norm_err: Vec<f64>,
}

fn set_norm_orbit(op: &dyn AccretiveOperator, x: &[f64], ts: &[f64]) -> Result<SetNormOrbit> {
    let orb = orbit(op, x, ts, ORBIT_SUBSTEPS)?;
    let set_norms: Vec<f64> = orb.states.iter().map(|s| set_norm(op, s)).collect();
    let set_norm_err = if orb.errors.iter().all(|e| *e == 0.0) {
        vec![0.0; ts.len()]
    } else {
        // compare with a run of twice the resolution
        let finer = orbit(op, x, ts, 2 * ORBIT_SUBSTEPS)?;
        finer
            .states
            .iter()
            .zip(&set_norms)
            .map(|(s, a)| (set_norm(op, s) - a).abs())
            .collect()
    };
    Ok(SetNormOrbit {
        orbit: orb,
        set_norms,
        set_norm_err,
    })
}

/// Checks that `S(t)` maps into the domain, the pointwise bound `|AS(t)x| ≤ K(x,t)/t`
/// at every node `t < τ`, and the norm chain
/// `N^τ_E(x)/(e^{ωτ}‖P‖+1) ≤ ‖|AS(t)x|χ_{(0,τ)}‖_E ≤ N^τ_E(x)`. The constant 1 in the
/// pointwise bound holds for subgradients and for symmetric positive semidefinite matrices.
pub fn check_regularizing(
    instance: &str,
    op: &OpRef,
    x: &[f64],
    space: &FunctionSpace,
    tau: f64,
    grid: &LogGrid,
) -> Result<TheoremReport> {
    space.validate()?;
    let p_norm = space.hardy_bound()?;
    let omega = op.omega();
    require_tau_omega(tau, omega)?;
    require_tau_on_grid(grid, tau)?;
    require_closure(op.as_ref(), x)?;
    let (ts, below) = chain_nodes(grid, tau, omega);
    let sub = grid.truncated(*ts.last().expect("nonempty"))?;
    let ts = sub.nodes();
    let mut rep = TheoremReport::new("regularizing", instance);
    rep.constant("tau", tau);
    rep.constant("omega", omega);
    rep.constant("hardy_bound", p_norm);
    rep.constant("regularizing_constant", 1.0);

    let so = set_norm_orbit(op.as_ref(), x, ts)?;
    rep.note(format!("orbit scheme {:?}", so.orbit.scheme));
    let into_domain = so
        .orbit
        .states
        .iter()
        .all(|s| domain_indicator(op.as_ref(), s) == DomainStatus::InDomain);
    rep.push_flag("maps-into-domain", tau, into_domain);

    let profile = k_profile(&AccretiveCouple::new(op.clone()), x, &sub)?;
    let k = k_sides(&profile, ts.len());
    if !k.certified {
        rep.note(UNCERTIFIED_NOTE);
    }
    for i in 0..below {
        let t = ts[i];
        let a = so.set_norms[i];
        let kl = k.lower[i] / t;
        rep.push(
            "pointwise",
            t,
            a,
            kl,
            1.0,
            SLACK_FACTOR * so.set_norm_err[i] + ROUNDING * (a + kl),
            k.certified,
        );
    }
    let (g, gq) = windowed(space, &sub, &so.set_norms, 0.0, tau)?;
    let (ge, _) = windowed(space, &sub, &so.set_norm_err, 0.0, tau)?;
    let up = profile.k_over_t();
    let nu = space.norm_window(&up, 0.0, tau)?;
    let nuq = quadrature_error(space, &up, 0.0, tau)?;
    let (nl, nlq) = match profile.lower_over_t() {
        Some(l) => (space.norm_window(&l, 0.0, tau)?, quadrature_error(space, &l, 0.0, tau)?),
        None => (nu, nuq),
    };
    rep.constant("set_norm_norm", g);
    rep.constant("n_tau_upper", nu);
    rep.constant("n_tau_lower", nl);
    let c = 1.0 / ((omega * tau).exp() * p_norm + 1.0);
    rep.push(
        "norm-lower",
        tau,
        c * nu,
        g,
        c,
        SLACK_FACTOR * (c * nuq + gq + ge) + ROUNDING * (nu + g),
        true,
    );
    rep.push(
        "norm-upper",
        tau,
        g,
        nl,
        1.0,
        SLACK_FACTOR * (gq + ge + nlq) + ROUNDING * (nu + g),
        k.certified,
    );
    Ok(rep.finish())
}

/// `(1/h²)·tridiag(−1, 2, −1)` of size `n`, the Dirichlet Laplacian on `n` interior nodes.
pub fn dirichlet_laplacian_matrix(n: usize) -> DMatrix<f64> {
    let h = 1.0 / (n + 1) as f64;
    let s = 1.0 / (h * h);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * s
        } else if i.abs_diff(j) == 1 {
            -s
        } else {
            0.0
        }
    })
}

/// `‖tAe^{−tA}‖₂` from the matrix exponential and a singular value decomposition.
pub fn t_a_exp_norm(m: &DMatrix<f64>, t: f64) -> f64 {
    let e = (m * (-t)).exp();
    let prod = m * e * t;
    prod.svd(false, false).singular_values.amax()
}

/// Maximum of `t ↦ ‖tAe^{−tA}‖` over the nodes `t < τ`, refined by golden-section search
/// around the best node. Returns `(sup, argmax)`.
pub fn linear_sup(m: &DMatrix<f64>, tau: f64, grid: &LogGrid) -> (f64, f64) {
    let ts: Vec<f64> = grid.nodes().iter().copied().filter(|&t| t < tau).collect();
    let vals: Vec<f64> = ts.par_iter().map(|&t| t_a_exp_norm(m, t)).collect();
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, v) in vals.iter().enumerate() {
        if *v > best {
            best = *v;
            best_i = i;
        }
    }
    let lo = ts[best_i.saturating_sub(1)].ln();
    let hi = ts[(best_i + 1).min(ts.len() - 1)].ln();
    let f = |u: f64| t_a_exp_norm(m, u.exp());
    let (mut a, mut b) = (lo, hi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let u = 0.5 * (a + b);
    let v = f(u);
    if v > best {
        (v, u.exp())
    } else {
        (best, ts[best_i])
    }
}

/// For a symmetric positive semidefinite matrix, `sup_{t<τ} ‖tAe^{−tA}‖` equals
/// `max_λ sup_{t<τ} tλe^{−tλ}`, which is `e^{−1}` once `τλ_max > 1`. The report checks
/// the measured supremum against that value from both sides.
pub fn check_linear_regularizing(instance: &str, op: &MatrixOperator, tau: f64, grid: &LogGrid) -> Result<TheoremReport> {
    let (_, eig) = op
        .eigen()
        .ok_or_else(|| Error::Precondition("requires a symmetric matrix".into()))?;
    if eig.iter().any(|&l| l < -1e-12) {
        return Err(Error::Precondition("requires a positive semidefinite matrix".into()));
    }
    require_tau_on_grid(grid, tau)?;
    let scalar = |l: f64| {
        // sup over t < τ of tλe^{−tλ}: attained at 1/λ when that lies below τ
        if l <= 0.0 {
            0.0
        } else if l * tau > 1.0 {
            (-1.0f64).exp()
        } else {
            tau * l * (-tau * l).exp()
        }
    };
    let expected = eig.iter().map(|&l| scalar(l)).fold(0.0, f64::max);
    let (sup, argmax) = linear_sup(op.matrix(), tau, grid);
    let mut rep = TheoremReport::new("regularizing-linear", instance);
    rep.constant("tau", tau);
    rep.constant("measured_sup", sup);
    rep.constant("argmax_t", argmax);
    rep.constant("expected_sup", expected);
    rep.constant("lambda_max", eig.iter().copied().fold(0.0, f64::max));
    rep.push("sup-upper", argmax, sup, expected, 1.0, 1e-10 * (1.0 + expected), true);
    rep.push("sup-attained", argmax, expected, sup, 1.0, 1e-3, true);
    Ok(rep.finish())
}

/// Checks `‖S(t+h)x − S(t)x‖ ≤ e^{ωT}(1+e^{ωτ})·N^τ_E(x)·h/‖χ_{(0,h)}‖_E` for
/// `t ∈ {0, T/4, T/2, T}` and sampled `h ∈ [10⁻⁴τ, τ)`, and fits the exponent of
/// `h ↦ ‖S(h)x − x‖`; on `E_{θ,p}` the fitted exponent must be at least `θ − 0.05`.
pub fn check_holder(
    instance: &str,
    op: &OpRef,
    x: &[f64],
    space: &FunctionSpace,
    tau: f64,
    horizon: f64,
    grid: &LogGrid,
) -> Result<TheoremReport> {
    space.validate()?;
    let omega = op.omega();
    require_tau_omega(tau, omega)?;
    require_tau_on_grid(grid, tau)?;
    require_closure(op.as_ref(), x)?;
    if !(horizon >= 0.0 && horizon + tau <= grid.t_max()) {
        return Err(Error::Parameter(format!(
            "horizon T = {horizon} must satisfy 0 <= T and T + tau <= t_max"
        )));
    }
    let sp = op.space();
    let mut rep = TheoremReport::new("holder", instance);
    rep.constant("tau", tau);
    rep.constant("horizon", horizon);
    rep.constant("omega", omega);
    if let Some((theta, p)) = space.theta_p() {
        rep.constant("theta", theta);
        rep.constant("p", p);
    }

    let (ts, _) = chain_nodes(grid, tau, omega);
    let sub = grid.truncated(*ts.last().expect("nonempty"))?;
    let profile = k_profile(&AccretiveCouple::new(op.clone()), x, &sub)?;
    let up = profile.k_over_t();
    let (n, nq, cert) = match profile.lower_over_t() {
        Some(l) => (space.norm_window(&l, 0.0, tau)?, quadrature_error(space, &l, 0.0, tau)?, true),
        None => (space.norm_window(&up, 0.0, tau)?, quadrature_error(space, &up, 0.0, tau)?, false),
    };
    if !cert {
        rep.note(UNCERTIFIED_NOTE);
    }
    rep.constant("n_tau", n);

    let hs: Vec<f64> = grid
        .nodes()
        .iter()
        .copied()
        .filter(|&h| h >= 1e-4 * tau && h < tau)
        .step_by(16)
        .collect();
    let starts = [0.0, 0.25 * horizon, 0.5 * horizon, horizon];
    // evaluation times: the grid nodes up to T + τ keep the steps geometric
    let mut times: Vec<f64> = grid
        .nodes()
        .iter()
        .copied()
        .filter(|&t| t <= horizon + tau)
        .collect();
    for &s in &starts {
        for &h in &hs {
            times.push(s + h);
        }
        if s > 0.0 {
            times.push(s);
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs());
    let orb = orbit(op.as_ref(), x, &times, ORBIT_SUBSTEPS)?;
    rep.note(format!("orbit scheme {:?}", orb.scheme));
    let at = |t: f64| -> (Vec<f64>, f64) {
        if t == 0.0 {
            return (x.to_vec(), 0.0);
        }
        let i = times.partition_point(|&s| s < t * (1.0 - 1e-15));
        (orb.states[i].clone(), orb.errors[i])
    };
    let growth = (omega * horizon).exp() * (1.0 + (omega * tau).exp());
    rep.constant("growth_constant", growth);
    let mut fit: Vec<(f64, f64)> = Vec::new();
    for &s in &starts {
        let (u0, e0) = at(s);
        for &h in &hs {
            let (u1, e1) = at(s + h);
            let lhs = sp.dist(&u0, &u1);
            let factor = growth * h / space.indicator_norm(h);
            let rhs = factor * n;
            rep.push(
                "displacement",
                s + h,
                lhs,
                rhs,
                factor,
                SLACK_FACTOR * (e0 + e1 + factor * nq) + ROUNDING * (lhs + rhs),
                cert,
            );
            if s == 0.0 && lhs > 0.0 {
                fit.push((h.ln(), lhs.ln()));
            }
        }
    }
    if fit.len() >= 2 {
        let k = fit.len() as f64;
        let (mx, my) = (
            fit.iter().map(|p| p.0).sum::<f64>() / k,
            fit.iter().map(|p| p.1).sum::<f64>() / k,
        );
        let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        rep.constant("fitted_exponent", slope);
        if let Some((theta, _)) = space.theta_p() {
            rep.push("exponent", 0.0, theta - 0.05, slope, 1.0, 0.0, true);
        }
    } else {
        rep.note("orbit is stationary: no exponent to fit");
    }
    Ok(rep.finish())
}

/// Checks the two-sided estimate of the truncated interpolation function of the couple
/// `(‖·‖, √E)` on the squared space `E²`:
/// `(1/√2)‖R·χ_{(0,τ²/2)}‖ ≤ N^τ_{E²}(x) ≤ (1/(1−γ))‖R·χ_{(0,2τ²)}‖ + (γ/(1−γ))‖√(E(J_tx)/t)·χ_{(τ²,2τ²)}‖`
/// with `R(t) = ‖x−J_tx‖/t` and `γ = 2^{θ−1/2}`, which needs `θ < 1/2`.
pub fn check_subgradient(
    instance: &str,
    energy: Arc<dyn Energy>,
    x: &[f64],
    space: &FunctionSpace,
    tau: f64,
    grid: &LogGrid,
) -> Result<TheoremReport> {
    space.validate()?;
    if let Some((theta, _)) = space.theta_p() {
        if theta >= 0.5 {
            return Err(Error::Precondition(format!(
                "θ < 1/2 required (theta = {theta} gives γ = 2^(θ-1/2) = {:.4} >= 1)",
                gamma(space)
            )));
        }
    }
    square_space(space)?;
    let g = gamma(space);
    let (t_lo, t_hi) = (0.5 * tau * tau, 2.0 * tau * tau);
    if !(t_lo > grid.t_min() && t_hi <= grid.t_max()) {
        return Err(Error::Parameter(format!(
            "tau = {tau} needs (tau^2/2, 2 tau^2) inside the grid range"
        )));
    }
    energy.space().check_dim(x)?;
    let op = SubgradientOperator::new(energy.clone());
    let mut rep = TheoremReport::new("subgradient", instance);
    rep.constant("tau", tau);
    rep.constant("gamma", g);

    let m = cover_index(grid, t_hi);
    let ts = &grid.nodes()[..=m];
    let path = resolvent_path(&op, x, ts)?;
    let r: Vec<f64> = ts.iter().zip(&path.dist).map(|(t, d)| d / t).collect();
    let r_err: Vec<f64> = ts.iter().zip(&path.error).map(|(t, e)| e / t).collect();
    let en: Vec<f64> = ts
        .iter()
        .zip(&path.states)
        .map(|(t, j)| (energy.value(j).max(0.0) / t).sqrt())
        .collect();
    let (left_raw, lq) = windowed(space, grid, &r, 0.0, t_lo)?;
    let (left_err, _) = windowed(space, grid, &r_err, 0.0, t_lo)?;
    let left = left_raw / SQRT_2;
    let (r2, r2q) = windowed(space, grid, &r, 0.0, t_hi)?;
    let (r2e, _) = windowed(space, grid, &r_err, 0.0, t_hi)?;
    let (en_norm, enq) = windowed(space, grid, &en, tau * tau, t_hi)?;
    let right = r2 / (1.0 - g) + g / (1.0 - g) * en_norm;
    let right_err = (r2q + r2e) / (1.0 - g) + g / (1.0 - g) * enq;

    // K(x, s) on the grid of square roots, read back as t ↦ K(x, √t)/t
    let s_grid = LogGrid::new(grid.t_min().sqrt(), grid.t_max().sqrt(), grid.len())?;
    let couple = SqrtEnergyCouple::new(energy.clone());
    let profile = k_profile(&couple, x, &s_grid)?;
    let as_t = |k: &[f64]| -> Result<GridFunction> {
        GridFunction::new(
            grid.clone(),
            k.iter().zip(grid.nodes()).map(|(v, t)| v / t).collect(),
        )
    };
    let mid_up_f = as_t(&profile.k)?;
    let mid_up = space.norm_window(&mid_up_f, 0.0, tau * tau)?;
    let mid_up_q = quadrature_error(space, &mid_up_f, 0.0, tau * tau)?;
    let (mid_low, mid_low_q, cert) = match &profile.k_lower {
        Some(l) => {
            let f = as_t(l)?;
            (space.norm_window(&f, 0.0, tau * tau)?, quadrature_error(space, &f, 0.0, tau * tau)?, true)
        }
        None => (mid_up, mid_up_q, false),
    };
    if !cert {
        rep.note(UNCERTIFIED_NOTE);
    }
    rep.note(format!("K evaluated by {:?}", profile.method));
    rep.constant("lower_side", left);
    rep.constant("interpolation_upper", mid_up);
    rep.constant("interpolation_lower", mid_low);
    rep.constant("upper_side", right);
    rep.push(
        "lower",
        tau,
        left,
        mid_low,
        1.0 / SQRT_2,
        SLACK_FACTOR * ((lq + left_err) / SQRT_2 + mid_low_q) + ROUNDING * (left + mid_low),
        cert,
    );
    rep.push(
        "upper",
        tau,
        mid_up,
        right,
        1.0 / (1.0 - g),
        SLACK_FACTOR * (mid_up_q + right_err) + ROUNDING * (mid_up + right),
        true,
    );
    Ok(rep.finish())
}

/// `(α, r) = (qθ/(1+θ(q−2)), p(1+θ(q−2)))`.
pub fn exponent_map(q: f64, theta: f64, p: f64) -> (f64, f64) {
    let d = 1.0 + theta * (q - 2.0);
    (q * theta / d, p * d)
}

/// Initial data families for the q-Laplace experiment on the interior mesh points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialData {
    /// `sin(πx)`.
    Smooth,
    /// `1 − |2x − 1|`.
    Hat,
    /// `sign(sin(6πx))`, a square wave with jumps at the mesh scale.
    Rough,
    Zero,
}

impl InitialData {
    pub const FAMILIES: [InitialData; 3] = [InitialData::Smooth, InitialData::Hat, InitialData::Rough];

    pub fn sample(self, n: usize) -> Vec<f64> {
        let h = 1.0 / (n + 1) as f64;
        (1..=n)
            .map(|j| {
                let x = j as f64 * h;
                match self {
                    InitialData::Smooth => (PI * x).sin(),
                    InitialData::Hat => 1.0 - (2.0 * x - 1.0).abs(),
                    InitialData::Rough => {
                        let s = (6.0 * PI * x).sin();
                        if s.abs() < 1e-12 {
                            0.0
                        } else {
                            s.signum()
                        }
                    }
                    InitialData::Zero => 0.0,
                }
            })
            .collect()
    }

    pub fn label(self) -> &'static str {
        match self {
            InitialData::Smooth => "smooth",
            InitialData::Hat => "hat",
            InitialData::Rough => "rough",
            InitialData::Zero => "zero",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "smooth" => Ok(InitialData::Smooth),
            "hat" => Ok(InitialData::Hat),
            "rough" => Ok(InitialData::Rough),
            "zero" => Ok(InitialData::Zero),
            other => Err(Error::Parameter(format!("unknown initial data family '{other}'"))),
        }
    }
}

/// Orbit and resolvent data of one q-Laplace run, shared by every `θ`.
struct QLaplaceRun {
    grid: LogGrid,
    /// `‖∂_t u‖` at the nodes from centered difference quotients of the orbit.
    speed: Vec<f64>,
    speed_err: Vec<f64>,
    /// `|Δ_q u(t)|` at the nodes.
    set_norms: Vec<f64>,
    resolvent: Vec<f64>,
    resolvent_err: Vec<f64>,
    orbit_err: f64,
}

fn qlaplace_run(q: f64, u0: &[f64], horizon: f64, grid: &LogGrid) -> Result<QLaplaceRun> {
    let op = q_laplace(q, u0.len())?;
    let sp: &NormedSpace = op.space();
    let m = cover_index(grid, horizon);
    let sub = grid.truncated(grid.nodes()[m])?;
    let ts = sub.nodes();
    let n = ts.len();
    let orb = orbit(&op, u0, ts, ORBIT_SUBSTEPS)?;
    let state = |i: isize| -> &[f64] {
        if i < 0 {
            u0
        } else {
            &orb.states[i as usize]
        }
    };
    let time = |i: isize| if i < 0 { 0.0 } else { ts[i as usize] };
    let quotient = |a: isize, b: isize| sp.dist(state(a), state(b)) / (time(b) - time(a));
    let speed: Vec<f64> = (0..n as isize)
        .map(|i| {
            let hi = (i + 1).min(n as isize - 1);
            quotient(i - 1, hi)
        })
        .collect();
    // stride-2 quotients estimate the discretization error; orbit errors enter through
    // the differences
    let speed_err: Vec<f64> = (0..n as isize)
        .map(|i| {
            let hi = (i + 2).min(n as isize - 1);
            let lo = (i - 2).max(-1);
            let e = orb.errors[(lo.max(0)) as usize].max(orb.errors[hi as usize]);
            (quotient(lo, hi) - speed[i as usize]).abs() + 2.0 * e / (time(hi) - time(lo))
        })
        .collect();
    let set_norms = orb.states.iter().map(|s| set_norm(&op, s)).collect();
    let path = resolvent_path(&op, u0, ts)?;
    let resolvent = ts.iter().zip(&path.dist).map(|(t, d)| d / t).collect();
    let resolvent_err = ts.iter().zip(&path.error).map(|(t, e)| e / t).collect();
    Ok(QLaplaceRun {
        grid: sub,
        speed,
        speed_err,
        set_norms,
        resolvent,
        resolvent_err,
        orbit_err: orb.errors.iter().copied().fold(0.0, f64::max),
    })
}

/// The q-Laplace regularity experiment for every `θ` in `thetas` on one initial datum,
/// sharing the orbit: with `τ = T`, the norms `W = ‖‖∂_t u‖χ_{(0,T)}‖` and
/// `R = ‖‖u₀−J_tu₀‖/t·χ_{(0,T)}‖` in `E_{θ,p}` must be finite together and satisfy
/// `1/(2(‖P‖+1)) ≤ W/R ≤ 2`.
pub fn qlaplace_regularity_sweep(
    label: &str,
    q: f64,
    thetas: &[f64],
    p: f64,
    u0: &[f64],
    horizon: f64,
    grid: &LogGrid,
) -> Result<Vec<TheoremReport>> {
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::Parameter(format!("requires q in [2, inf), got {q}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("requires p in (1, inf), got {p}")));
    }
    for &theta in thetas {
        if !(theta > 0.0 && theta < 0.5) {
            return Err(Error::Precondition(format!("requires theta in (0, 1/2), got {theta}")));
        }
    }
    require_tau_on_grid(grid, horizon)?;
    let run = qlaplace_run(q, u0, horizon, grid)?;
    let g = &run.grid;
    thetas
        .iter()
        .map(|&theta| {
            let space = FunctionSpace::weighted(theta, p)?;
            let p_norm = space.hardy_bound()?;
            let (alpha, r_exp) = exponent_map(q, theta, p);
            let mut rep = TheoremReport::new(
                "qlaplace-regularity",
                format!("{label} q={q} theta={theta} p={p}"),
            );
            rep.constant("q", q);
            rep.constant("theta", theta);
            rep.constant("p", p);
            rep.constant("alpha", alpha);
            rep.constant("r", r_exp);
            rep.constant("horizon", horizon);
            rep.constant("max_orbit_error", run.orbit_err);
            let speed = padded(g, &run.speed)?;
            let res = padded(g, &run.resolvent)?;
            let w = probe_norm(&space, &speed, 0.0, horizon)?;
            let r = probe_norm(&space, &res, 0.0, horizon)?;
            let (wq, rq) = (
                quadrature_error(&space, &speed, 0.0, horizon)?,
                quadrature_error(&space, &res, 0.0, horizon)?,
            );
            let (we, _) = windowed(&space, g, &run.speed_err, 0.0, horizon)?;
            let (re, _) = windowed(&space, g, &run.resolvent_err, 0.0, horizon)?;
            let (sn, _) = windowed(&space, g, &run.set_norms, 0.0, horizon)?;
            rep.constant("speed_norm", w.value);
            rep.constant("resolvent_norm", r.value);
            rep.constant("set_norm_norm", sn);
            if w.value > 0.0 {
                rep.constant("speed_vs_set_norm_deviation", (sn - w.value).abs() / w.value);
            }
            rep.push_flag("indicators-agree", horizon, w.finite == r.finite);
            let (w_slack, r_slack) = (SLACK_FACTOR * (wq + we), SLACK_FACTOR * (rq + re));
            rep.push(
                "ratio-upper",
                horizon,
                w.value,
                2.0 * r.value,
                2.0,
                w_slack + 2.0 * r_slack + ROUNDING * (w.value + r.value),
                true,
            );
            let c = 1.0 / (2.0 * (p_norm + 1.0));
            rep.push(
                "ratio-lower",
                horizon,
                c * r.value,
                w.value,
                c,
                c * r_slack + w_slack + ROUNDING * (w.value + r.value),
                true,
            );
            Ok(rep.finish())
        })
        .collect()
}

/// The q-Laplace regularity experiment for a single `θ`.
pub fn qlaplace_regularity(
    label: &str,
    q: f64,
    theta: f64,
    p: f64,
    u0: &[f64],
    horizon: f64,
    grid: &LogGrid,
) -> Result<TheoremReport> {
    Ok(qlaplace_regularity_sweep(label, q, &[theta], p, u0, horizon, grid)?.remove(0))
}
