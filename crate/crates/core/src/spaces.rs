//! Banach function spaces over (0, ∞): weighted Lebesgue spaces, L¹, L∞ and L¹∩L∞,
//! together with the averaging operator `Pf(t) = (1/t)∫₀ᵗ f` and the dilation `f ↦ f(2·)`.
//!
//! Norms are evaluated on the grid with the trapezoidal rule in `t`. Functions are
//! extended below `t_min` by their value at `t_min`; nothing is added above `t_max`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Interpolant, LogGrid};

/// A Banach function space over `(0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FunctionSpace {
    /// `L^p(0,∞; t^{p(1-θ)-1} dt)`.
    WeightedLp { theta: f64, p: f64 },
    L1,
    Linf,
    /// `L¹ ∩ L∞` with norm `max(‖f‖₁, ‖f‖∞)`.
    L1capLinf,
}

impl FunctionSpace {
    pub fn weighted(theta: f64, p: f64) -> Result<Self> {
        let s = FunctionSpace::WeightedLp { theta, p };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let FunctionSpace::WeightedLp { theta, p } = *self {
            if !(theta > 0.0 && theta < 1.0) {
                return Err(Error::Parameter(format!("theta must lie in (0,1), got {theta}")));
            }
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::Parameter(format!("p must lie in [1,inf), got {p}")));
            }
        }
        Ok(())
    }

    /// `(θ, p)` for weighted spaces.
    pub fn theta_p(&self) -> Option<(f64, f64)> {
        match *self {
            FunctionSpace::WeightedLp { theta, p } => Some((theta, p)),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            FunctionSpace::WeightedLp { theta, p } => format!("E(theta={theta},p={p})"),
            FunctionSpace::L1 => "L1".into(),
            FunctionSpace::Linf => "Linf".into(),
            FunctionSpace::L1capLinf => "L1capLinf".into(),
        }
    }

    /// Parses `theta=0.5,p=2`, `L1`, `Linf` or `L1capLinf`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "l1" => return Ok(FunctionSpace::L1),
            "linf" => return Ok(FunctionSpace::Linf),
            "l1caplinf" => return Ok(FunctionSpace::L1capLinf),
            _ => {}
        }
        let mut theta = None;
        let mut p = None;
        for part in t.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("cannot parse space '{s}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad number in space '{s}'")))?;
            match k.trim() {
                "theta" => theta = Some(v),
                "p" => p = Some(v),
                other => return Err(Error::Parameter(format!("unknown space key '{other}'"))),
            }
        }
        match (theta, p) {
            (Some(theta), Some(p)) => FunctionSpace::weighted(theta, p),
            _ => Err(Error::Parameter(format!("space '{s}' needs theta and p"))),
        }
    }

    /// Norm of `f` over the whole grid.
    pub fn norm(&self, f: &GridFunction) -> Result<f64> {
        self.norm_window(f, 0.0, f64::INFINITY)
    }

    /// Norm of `f·χ_{(lo, hi)}`; cuts falling between nodes are integrated exactly
    /// for the interpolant of `f`.
    pub fn norm_window(&self, f: &GridFunction, lo: f64, hi: f64) -> Result<f64> {
        self.validate()?;
        if lo.is_nan() || hi.is_nan() || lo < 0.0 {
            return Err(Error::Parameter(format!("invalid window ({lo}, {hi})")));
        }
        if !(lo < hi) {
            return Ok(0.0);
        }
        Ok(match *self {
            FunctionSpace::WeightedLp { theta, p } => {
                lp_integral(f, p, p * (1.0 - theta) - 1.0, lo, hi).powf(1.0 / p)
            }
            FunctionSpace::L1 => lp_integral(f, 1.0, 0.0, lo, hi),
            FunctionSpace::Linf => sup_window(f, lo, hi),
            FunctionSpace::L1capLinf => lp_integral(f, 1.0, 0.0, lo, hi).max(sup_window(f, lo, hi)),
        })
    }

    /// Exact norm of `χ_{(0,h)}`.
    pub fn indicator_norm(&self, h: f64) -> f64 {
        match *self {
            FunctionSpace::WeightedLp { theta, p } => {
                h.powf(1.0 - theta) / (p * (1.0 - theta)).powf(1.0 / p)
            }
            FunctionSpace::L1 => h,
            FunctionSpace::Linf => 1.0,
            FunctionSpace::L1capLinf => h.max(1.0),
        }
    }

    /// Analytic bound for the norm of the averaging operator on this space.
    pub fn hardy_bound(&self) -> Result<f64> {
        match *self {
            FunctionSpace::WeightedLp { theta, .. } => Ok(1.0 / theta),
            FunctionSpace::Linf => Ok(1.0),
            FunctionSpace::L1 => Err(Error::Precondition("Hardy unbounded on L¹".into())),
            FunctionSpace::L1capLinf => Err(Error::Precondition(
                "Hardy unbounded on L¹∩L∞ (averages of integrable functions decay only like 1/t)"
                    .into(),
            )),
        }
    }
}

/// `‖f‖_E` on the whole grid.
pub fn norm_e(space: &FunctionSpace, f: &GridFunction) -> Result<f64> {
    space.norm(f)
}

/// Antiderivative of `t^a`, valid for `a > -1`.
fn power_antiderivative(a: f64, t: f64) -> f64 {
    t.powf(a + 1.0) / (a + 1.0)
}

/// `∫ f^p t^a dt` over `(lo, hi)` with the extension of `f` below `t_min`.
fn lp_integral(f: &GridFunction, p: f64, a: f64, lo: f64, hi: f64) -> f64 {
    let grid = f.grid();
    let nodes = grid.nodes();
    let vals = f.values();
    let t0 = nodes[0];
    let mut total = 0.0;
    // (0, t_min] piece with constant value f(t_min)
    if lo < t0 {
        let seg_hi = hi.min(t0);
        let w = power_antiderivative(a, seg_hi) - power_antiderivative(a, lo);
        total += weighted_power(vals[0], p, w);
    }
    match f.interpolant() {
        Interpolant::Linear => {
            for (i, w) in grid.window_weights(lo, hi) {
                let g = if vals[i] == 0.0 {
                    0.0
                } else {
                    vals[i].powf(p) * nodes[i].powf(a)
                };
                total += weighted_power_raw(g, w);
            }
        }
        Interpolant::Step => {
            for i in 1..nodes.len() {
                let l = nodes[i - 1].max(lo);
                let r = nodes[i].min(hi);
                if l < r {
                    let w = power_antiderivative(a, r) - power_antiderivative(a, l);
                    total += weighted_power(vals[i], p, w);
                }
            }
        }
    }
    total
}

fn weighted_power(v: f64, p: f64, w: f64) -> f64 {
    if w <= 0.0 || v == 0.0 {
        0.0
    } else {
        v.powf(p) * w
    }
}

fn weighted_power_raw(g: f64, w: f64) -> f64 {
    if w <= 0.0 || g == 0.0 {
        0.0
    } else {
        g * w
    }
}

fn sup_window(f: &GridFunction, lo: f64, hi: f64) -> f64 {
    let nodes = f.grid().nodes();
    let vals = f.values();
    let mut m: f64 = 0.0;
    if lo < nodes[0] {
        m = m.max(vals[0]);
    }
    for (i, (&t, &v)) in nodes.iter().zip(vals).enumerate() {
        let inside = match f.interpolant() {
            Interpolant::Linear => t > lo && t < hi,
            // value v_i holds on (t_{i-1}, t_i]
            Interpolant::Step => {
                let left = if i == 0 { 0.0 } else { nodes[i - 1] };
                left < hi && t > lo
            }
        };
        if inside {
            m = m.max(v);
        }
    }
    if f.interpolant() == Interpolant::Linear {
        for c in [lo, hi] {
            if c > nodes[0] && c < nodes[nodes.len() - 1] {
                m = m.max(f.eval(c));
            }
        }
    }
    m
}

/// The averaging operator `Pf(t) = (1/t)∫₀ᵗ f(s) ds`, integrating the interpolant of `f`
/// exactly (trapezoidal rule for linear interpolants).
pub fn hardy_apply(f: &GridFunction) -> Result<GridFunction> {
    let nodes = f.grid().nodes();
    let vals = f.values();
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = nodes[0] * vals[0];
    if vals[0].is_infinite() {
        acc = f64::INFINITY;
    }
    out.push(if acc.is_infinite() { acc } else { acc / nodes[0] });
    for i in 1..nodes.len() {
        let dt = nodes[i] - nodes[i - 1];
        let inc = match f.interpolant() {
            Interpolant::Linear => 0.5 * dt * (vals[i - 1] + vals[i]),
            Interpolant::Step => dt * vals[i],
        };
        acc += inc;
        out.push(if acc.is_infinite() { acc } else { acc / nodes[i] });
    }
    GridFunction::new(f.grid().clone(), out)
}

/// Dilation `t ↦ f(2t)`: linear in log-index between nodes for linear interpolants,
/// cell lookup for step interpolants, constant `f(t_max)` beyond the grid.
pub fn dilation_apply(f: &GridFunction) -> Result<GridFunction> {
    let grid = f.grid();
    let n = grid.len();
    let vals = f.values();
    let shift = std::f64::consts::LN_2 / grid.log_step();
    let shift = if (shift - shift.round()).abs() < 1e-9 {
        shift.round()
    } else {
        shift
    };
    let out = (0..n)
        .map(|i| {
            let u = i as f64 + shift;
            if u >= (n - 1) as f64 {
                return vals[n - 1];
            }
            let j = u.floor() as usize;
            let s = u - j as f64;
            match f.interpolant() {
                Interpolant::Linear => crate::grid::lerp(vals[j], vals[j + 1], s),
                Interpolant::Step => {
                    if s == 0.0 {
                        vals[j]
                    } else {
                        vals[j + 1]
                    }
                }
            }
        })
        .collect();
    GridFunction::with_interpolant(grid.clone(), out, f.interpolant())
}

/// Norm of the dilation `f ↦ f(2·)`: `2^{-(1-θ)}` on weighted spaces. On the unweighted
/// kinds the value 1 is returned (the change of variables gives 1/2 on L¹ and 1 on L∞;
/// 1 bounds both).
pub fn dilation_norm(space: &FunctionSpace) -> f64 {
    match *space {
        FunctionSpace::WeightedLp { theta, .. } => 2f64.powf(-(1.0 - theta)),
        _ => 1.0,
    }
}

/// `γ = √2 ‖D₂‖`, which is `2^{θ-1/2}` on weighted spaces.
pub fn gamma(space: &FunctionSpace) -> f64 {
    std::f64::consts::SQRT_2 * dilation_norm(space)
}

/// The space `E² = {g : t ↦ g(√t)/√t ∈ E}` for `E = E_{θ,p}`, which is `E_{2θ,p}` as a set;
/// only defined for `θ < 1/2`.
pub fn square_space(space: &FunctionSpace) -> Result<FunctionSpace> {
    match *space {
        FunctionSpace::WeightedLp { theta, p } if theta < 0.5 => {
            FunctionSpace::weighted(2.0 * theta, p)
        }
        _ => Err(Error::Precondition("E² not a Banach function space".into())),
    }
}

/// `‖t ↦ g(√t)/√t‖_E`, the norm of `g` in `E²` by its definition. `g` is sampled on
/// the points `√t_i` of `grid`.
pub fn squared_space_norm(
    space: &FunctionSpace,
    grid: &LogGrid,
    g: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let f = GridFunction::from_fn(grid, |t| {
        let s = t.sqrt();
        g(s) / s
    })?;
    space.norm_window(&f, lo, hi)
}

/// Lower estimate of `‖P‖` on `space` from trial functions `t^{-(1-θ)+ε}χ_{(0,1)}`
/// (plus indicators), evaluated on a wide dedicated grid. `trial_count` sets how many
/// values of `ε` are tried.
pub fn hardy_norm_estimate(space: &FunctionSpace, trial_count: usize) -> Result<f64> {
    space.validate()?;
    space.hardy_bound()?;
    let trial_count = trial_count.max(1);
    match *space {
        FunctionSpace::Linf => {
            let grid = LogGrid::new(1e-8, 1e2, 1001)?;
            let f = GridFunction::indicator_below(&grid, 1.0);
            let pf = hardy_apply(&f)?;
            Ok(space.norm(&pf)? / space.norm(&f)?)
        }
        FunctionSpace::WeightedLp { theta, p } => {
            // 64 nodes per decade, reaching as far toward 0 as the powers stay finite
            let decades = (250.0 / (p * (1.0 - theta))).min(200.0).floor() as usize;
            let grid = LogGrid::new(10f64.powi(-(decades as i32)), 1e4, (decades + 4) * 64 + 1)?;
            let mut best: f64 = 0.0;
            for k in 0..trial_count {
                // ε from 0.3 down to ~5e-3 geometrically
                let frac = if trial_count == 1 {
                    1.0
                } else {
                    k as f64 / (trial_count - 1) as f64
                };
                let eps = 0.3 * (0.005f64 / 0.3).powf(frac);
                let beta = (1.0 - theta) - eps;
                let f = GridFunction::from_fn(&grid, |t| if t <= 1.0 { t.powf(-beta) } else { 0.0 })?;
                let pf = hardy_apply(&f)?;
                let r = space.norm(&pf)? / space.norm(&f)?;
                if r.is_finite() {
                    best = best.max(r);
                }
            }
            let f = GridFunction::indicator_below(&grid, 1.0);
            let r = space.norm(&hardy_apply(&f)?)? / space.norm(&f)?;
            Ok(best.max(r))
        }
        _ => unreachable!("rejected by hardy_bound"),
    }
}

/// A norm value together with a finiteness verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormProbe {
    pub value: f64,
    pub finite: bool,
}

/// Cap above which a norm value counts as infinite.
pub const FINITENESS_CAP: f64 = 1e12;

/// Norm of `f·χ_{(lo,hi)}` with a verdict on whether the exact norm over `(0, hi)` is
/// finite. Besides the cap, the verdict compares the two lowest decades of the grid:
/// when the contribution keeps growing toward `t = 0` the function is not integrable
/// against the weight and the grid value only reflects the truncation at `t_min`.
pub fn probe_norm(space: &FunctionSpace, f: &GridFunction, lo: f64, hi: f64) -> Result<NormProbe> {
    let value = space.norm_window(f, lo, hi)?;
    let mut finite = value.is_finite() && value < FINITENESS_CAP;
    let t0 = f.grid().t_min();
    if finite && lo <= t0 && hi >= 100.0 * t0 {
        let low = space.norm_window(f, t0, 10.0 * t0)?;
        let next = space.norm_window(f, 10.0 * t0, 100.0 * t0)?;
        if low > 0.0 && low >= 0.99 * next {
            finite = false;
        }
    }
    Ok(NormProbe { value, finite })
}

/// Estimate of the quadrature error of `‖f·χ_{(lo,hi)}‖`: the difference to the same
/// norm on the grid with every second node. The coarse grid keeps the last node, so
/// with an even node count it starts at the second node.
pub fn quadrature_error(space: &FunctionSpace, f: &GridFunction, lo: f64, hi: f64) -> Result<f64> {
    let grid = f.grid();
    let n = grid.len();
    let k = (n - 1) / 2;
    if k < 1 {
        return Ok(0.0);
    }
    let first = n - 1 - 2 * k;
    let coarse = LogGrid::new(grid.nodes()[first], grid.t_max(), k + 1)?;
    let vals: Vec<f64> = (0..=k).map(|i| f.values()[first + 2 * i]).collect();
    let g = GridFunction::with_interpolant(coarse, vals, f.interpolant())?;
    let fine = space.norm_window(f, lo, hi)?;
    let rough = space.norm_window(&g, lo, hi)?;
    if fine.is_infinite() || rough.is_infinite() {
        return Ok(0.0);
    }
    Ok((fine - rough).abs())
}

/// `‖χ_{(τ,∞)}/t‖` split into the part on the grid (same quadrature as every other
/// norm) and the exact part beyond `t_max`. Infinite on L¹ and L¹∩L∞.
pub fn inverse_tail_norm(space: &FunctionSpace, grid: &LogGrid, tau: f64) -> Result<(f64, f64)> {
    let f = GridFunction::from_fn(grid, |t| 1.0 / t)?;
    let on_grid = space.norm_window(&f, tau, f64::INFINITY)?;
    let t1 = grid.t_max().max(tau);
    let beyond = match *space {
        FunctionSpace::WeightedLp { theta, p } => (t1.powf(-p * theta) / (p * theta)).powf(1.0 / p),
        FunctionSpace::Linf => 1.0 / t1,
        FunctionSpace::L1 | FunctionSpace::L1capLinf => f64::INFINITY,
    };
    Ok((on_grid, beyond))
}

/// Combines two norms of functions with disjoint supports.
pub fn disjoint_sum(space: &FunctionSpace, a: f64, b: f64) -> f64 {
    match *space {
        FunctionSpace::WeightedLp { p, .. } => {
            if a.is_infinite() || b.is_infinite() {
                f64::INFINITY
            } else {
                (a.powf(p) + b.powf(p)).powf(1.0 / p)
            }
        }
        FunctionSpace::L1 => a + b,
        FunctionSpace::Linf => a.max(b),
        // max(‖·‖₁, ‖·‖∞) is only bounded by the sum
        FunctionSpace::L1capLinf => a + b,
    }
}

/// `t ↦ min{1, 1/t²}`, which lies in every space between L¹∩L∞ and L¹+L∞.
pub fn embedding_witness(grid: &LogGrid) -> GridFunction {
    GridFunction::from_fn(grid, |t| (1.0f64).min(1.0 / (t * t))).expect("witness is finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_norm_on_half_weight() {
        let g = LogGrid::default();
        let s = FunctionSpace::weighted(0.5, 2.0).unwrap();
        let f = GridFunction::indicator_below(&g, 1.0);
        assert!((s.norm(&f).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hardy_rejects_l1() {
        let e = hardy_norm_estimate(&FunctionSpace::L1, 3).unwrap_err();
        assert!(e.to_string().contains("Hardy unbounded on L¹"));
    }

    #[test]
    fn square_space_boundary() {
        let s = FunctionSpace::weighted(0.5, 2.0).unwrap();
        assert!(square_space(&s)
            .unwrap_err()
            .to_string()
            .contains("E² not a Banach function space"));
    }

    #[test]
    fn json_shape() {
        let s = FunctionSpace::weighted(0.25, 2.0).unwrap();
        let j = serde_json::to_value(s).unwrap();
        assert_eq!(j["kind"], "WeightedLp");
        assert_eq!(j["theta"], 0.25);
        assert_eq!(j["p"], 2.0);
    }
}
