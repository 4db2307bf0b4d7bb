use std::sync::Arc;

use rayon::prelude::*;

use super::{Couple, KBounds, KMethod};
use crate::accretive::{resolve, set_norm, Energy, OpRef, SubgradientOperator};
use crate::error::{Error, Result};
use crate::grid::LogGrid;
use crate::normed::NormedSpace;

/// `(‖·‖, |A·|)` for an accretive operator `A`.
#[derive(Clone)]
pub struct AccretiveCouple {
    op: OpRef,
}

impl AccretiveCouple {
    pub fn new(op: OpRef) -> Self {
        AccretiveCouple { op }
    }
    pub fn op(&self) -> &OpRef {
        &self.op
    }
    fn admissible(&self, s: f64) -> bool {
        s * self.op.omega() < 1.0
    }
}

impl Couple for AccretiveCouple {
    fn name(&self) -> String {
        format!("accretive[{}]", self.op.name())
    }
    fn space(&self) -> &NormedSpace {
        self.op.space()
    }
    fn n0(&self, z: &[f64]) -> f64 {
        self.op.space().norm(z)
    }
    fn n1(&self, v: &[f64]) -> f64 {
        set_norm(self.op.as_ref(), v)
    }
    fn candidates(&self, x: &[f64], t: f64) -> Result<Vec<Vec<f64>>> {
        if self.admissible(t) {
            Ok(vec![resolve(self.op.as_ref(), t, x)?])
        } else {
            Ok(Vec::new())
        }
    }
    fn candidate_pool(&self, x: &[f64], grid: &LogGrid) -> Result<Vec<Vec<f64>>> {
        grid.nodes()
            .par_iter()
            .filter(|&&s| self.admissible(s))
            .map(|&s| resolve(self.op.as_ref(), s, x))
            .collect()
    }
    fn certificate(&self, x: &[f64], t: f64) -> Option<KBounds> {
        self.op.k_certificate(x, t)
    }
    fn search_radius(&self, _x: &[f64], level: f64) -> Option<f64> {
        Some(level / self.op.space().coercivity())
    }
    fn lipschitz_within(&self, _x: &[f64], _r: f64) -> Option<(f64, f64)> {
        Some((self.op.space().lipschitz(), self.op.set_norm_lipschitz()?))
    }
    fn upper_method(&self) -> KMethod {
        KMethod::Resolvent
    }
}

/// The discrete `(L¹, L∞)` couple on `(0,1)` split into `dim` equal cells; `K(f,t)` is
/// `∫₀ᵗ f*(s) ds` with `f*` the decreasing rearrangement of `|f|`.
#[derive(Clone, Debug)]
pub struct RearrangementCouple {
    l1: NormedSpace,
    linf: NormedSpace,
}

impl RearrangementCouple {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("rearrangement couple needs dim >= 1".into()));
        }
        Ok(RearrangementCouple {
            l1: NormedSpace::cell_l1_uniform(dim),
            linf: NormedSpace::cell_linf_uniform(dim),
        })
    }

    fn width(&self) -> f64 {
        1.0 / self.l1.dim as f64
    }

    /// Decreasing rearrangement of `|f|` as cell values.
    pub fn rearrangement(f: &[f64]) -> Vec<f64> {
        let mut a: Vec<f64> = f.iter().map(|v| v.abs()).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        a
    }

    /// `∫₀ᵗ f*(s) ds`.
    pub fn rearrangement_integral(&self, f: &[f64], t: f64) -> f64 {
        let w = self.width();
        let mut acc = 0.0;
        let mut left = 0.0;
        for v in Self::rearrangement(f) {
            if t <= left {
                break;
            }
            acc += v * (t.min(left + w) - left);
            left += w;
        }
        acc
    }

    /// `min_c ‖f − clamp(f, c)‖₁ + t c` over the breakpoints `c ∈ {0} ∪ {|f_i|}`, where
    /// the convex piecewise linear objective attains its minimum.
    pub fn truncation_brute_force(&self, f: &[f64], t: f64) -> (f64, f64) {
        let mut levels: Vec<f64> = f.iter().map(|v| v.abs()).collect();
        levels.push(0.0);
        let mut best = (f64::INFINITY, 0.0);
        for c in levels {
            let v = clamp(f, c);
            let k = self.n0(&crate::linalg::sub(f, &v)) + t * self.n1(&v);
            if k < best.0 {
                best = (k, c);
            }
        }
        best
    }
}

fn clamp(f: &[f64], c: f64) -> Vec<f64> {
    f.iter().map(|v| v.clamp(-c, c)).collect()
}

impl Couple for RearrangementCouple {
    fn name(&self) -> String {
        format!("L1-Linf[{}]", self.l1.dim)
    }
    fn space(&self) -> &NormedSpace {
        &self.l1
    }
    fn n0(&self, z: &[f64]) -> f64 {
        self.l1.norm(z)
    }
    fn n1(&self, v: &[f64]) -> f64 {
        self.linf.norm(v)
    }
    fn candidates(&self, x: &[f64], _t: f64) -> Result<Vec<Vec<f64>>> {
        Ok(x.iter().map(|c| clamp(x, c.abs())).collect())
    }
    fn candidate_pool(&self, x: &[f64], _grid: &LogGrid) -> Result<Vec<Vec<f64>>> {
        self.candidates(x, 1.0)
    }
    fn certificate(&self, x: &[f64], t: f64) -> Option<KBounds> {
        let k = self.rearrangement_integral(x, t);
        let star = Self::rearrangement(x);
        let cell = (t / self.width()).floor() as usize;
        let level = star.get(cell).copied().unwrap_or(0.0);
        Some(KBounds {
            upper: k,
            lower: Some(k),
            argmin: Some(clamp(x, level)),
            method: KMethod::Rearrangement,
        })
    }
    fn search_radius(&self, _x: &[f64], level: f64) -> Option<f64> {
        Some(level / self.l1.coercivity())
    }
    fn lipschitz_within(&self, _x: &[f64], _r: f64) -> Option<(f64, f64)> {
        Some((self.l1.lipschitz(), self.linf.lipschitz()))
    }
    fn upper_method(&self) -> KMethod {
        KMethod::Rearrangement
    }
}

/// Two norms on the same space: `N₀ = ‖·‖_{X₀}`, `N₁ = c‖·‖_{X₁}`.
#[derive(Clone, Debug)]
pub struct NormPairCouple {
    n0: NormedSpace,
    n1: NormedSpace,
    c: f64,
}

impl NormPairCouple {
    pub fn new(n0: NormedSpace, n1: NormedSpace, c: f64) -> Result<Self> {
        if n0.dim != n1.dim {
            return Err(Error::Structural("norm pair on spaces of different dimension".into()));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("norm pair scale must be > 0, got {c}")));
        }
        Ok(NormPairCouple { n0, n1, c })
    }
}

impl Couple for NormPairCouple {
    fn name(&self) -> String {
        format!("norms[{:?},{}*{:?}]", self.n0.kind, self.c, self.n1.kind)
    }
    fn space(&self) -> &NormedSpace {
        &self.n0
    }
    fn n0(&self, z: &[f64]) -> f64 {
        self.n0.norm(z)
    }
    fn n1(&self, v: &[f64]) -> f64 {
        self.c * self.n1.norm(v)
    }
    fn candidates(&self, x: &[f64], _t: f64) -> Result<Vec<Vec<f64>>> {
        Ok((1..64)
            .map(|k| {
                let s = k as f64 / 64.0;
                x.iter().map(|v| s * v).collect()
            })
            .collect())
    }
    fn candidate_pool(&self, x: &[f64], _grid: &LogGrid) -> Result<Vec<Vec<f64>>> {
        self.candidates(x, 1.0)
    }
    fn search_radius(&self, _x: &[f64], level: f64) -> Option<f64> {
        Some(level / self.n0.coercivity())
    }
    fn lipschitz_within(&self, _x: &[f64], _r: f64) -> Option<(f64, f64)> {
        Some((self.n0.lipschitz(), self.c * self.n1.lipschitz()))
    }
}

/// `(N₀^{p₀}, N₁^{p₁})` for a base couple with norm-like `N₀`.
#[derive(Clone)]
pub struct PoweredCouple {
    inner: Arc<dyn Couple>,
    p0: f64,
    p1: f64,
}

impl PoweredCouple {
    pub fn new(inner: Arc<dyn Couple>, p0: f64, p1: f64) -> Result<Self> {
        if !(p0 > 0.0 && p1 > 0.0 && p0.is_finite() && p1.is_finite()) {
            return Err(Error::Parameter(format!(
                "powers must be positive and finite, got {p0}, {p1}"
            )));
        }
        Ok(PoweredCouple { inner, p0, p1 })
    }
}

fn pow(v: f64, p: f64) -> f64 {
    if v.is_infinite() {
        v
    } else {
        v.powf(p)
    }
}

impl Couple for PoweredCouple {
    fn name(&self) -> String {
        format!("powered[{}^{},{}]", self.inner.name(), self.p0, self.p1)
    }
    fn space(&self) -> &NormedSpace {
        self.inner.space()
    }
    fn n0(&self, z: &[f64]) -> f64 {
        pow(self.inner.n0(z), self.p0)
    }
    fn n1(&self, v: &[f64]) -> f64 {
        pow(self.inner.n1(v), self.p1)
    }
    fn candidates(&self, x: &[f64], t: f64) -> Result<Vec<Vec<f64>>> {
        self.inner.candidates(x, t)
    }
    fn candidate_pool(&self, x: &[f64], grid: &LogGrid) -> Result<Vec<Vec<f64>>> {
        let mut pool = self.inner.candidate_pool(x, grid)?;
        // segment points help when the powers reshape the optimal path
        pool.extend((1..64).map(|k| x.iter().map(|v| v * k as f64 / 64.0).collect()));
        Ok(pool)
    }
    fn search_radius(&self, x: &[f64], level: f64) -> Option<f64> {
        self.inner.search_radius(x, level.powf(1.0 / self.p0))
    }
    fn lipschitz_within(&self, x: &[f64], r: f64) -> Option<(f64, f64)> {
        if self.p0 < 1.0 || self.p1 < 1.0 {
            return None;
        }
        let (l0, l1) = self.inner.lipschitz_within(x, r)?;
        let m0 = l0 * r;
        let m1 = self.inner.n1(x) + l1 * r;
        if !m1.is_finite() {
            return None;
        }
        Some((
            self.p0 * m0.powf(self.p0 - 1.0) * l0,
            self.p1 * m1.powf(self.p1 - 1.0) * l1,
        ))
    }
}

/// `(‖·‖_H, √E)` for a convex energy `E ≥ 0`.
#[derive(Clone)]
pub struct SqrtEnergyCouple {
    energy: Arc<dyn Energy>,
    op: SubgradientOperator,
}

impl SqrtEnergyCouple {
    pub fn new(energy: Arc<dyn Energy>) -> Self {
        let op = SubgradientOperator::new(energy.clone());
        SqrtEnergyCouple { energy, op }
    }
    pub fn energy(&self) -> &Arc<dyn Energy> {
        &self.energy
    }
    pub fn operator(&self) -> &SubgradientOperator {
        &self.op
    }
}

impl Couple for SqrtEnergyCouple {
    fn name(&self) -> String {
        format!("sqrt-energy[{}]", self.energy.name())
    }
    fn space(&self) -> &NormedSpace {
        self.energy.space()
    }
    fn n0(&self, z: &[f64]) -> f64 {
        self.energy.space().norm(z)
    }
    fn n1(&self, v: &[f64]) -> f64 {
        self.energy.value(v).max(0.0).sqrt()
    }
    fn candidates(&self, x: &[f64], t: f64) -> Result<Vec<Vec<f64>>> {
        // the proximal point at λ = t²/2 is near-optimal for K(x, t)
        Ok(vec![
            resolve(&self.op, 0.5 * t * t, x)?,
            resolve(&self.op, t, x)?,
        ])
    }
    fn certificate(&self, x: &[f64], t: f64) -> Option<KBounds> {
        self.energy.sqrt_seminorm().map(|s| s.k_bounds(x, t))
    }
    fn search_radius(&self, _x: &[f64], level: f64) -> Option<f64> {
        Some(level / self.energy.space().coercivity())
    }
    fn lipschitz_within(&self, _x: &[f64], _r: f64) -> Option<(f64, f64)> {
        let s = self.energy.sqrt_seminorm()?;
        Some((self.energy.space().lipschitz(), s.lipschitz()))
    }
    fn upper_method(&self) -> KMethod {
        KMethod::Resolvent
    }
}
