use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{AccretiveOperator, SpectralSeminorm, ValueSet};
use crate::error::{Error, Result};
use crate::interpolation::{KBounds, KMethod};
use crate::linalg::tridiag_solve;
use crate::normed::NormedSpace;

/// Second derivative of an energy as an operator in the space's inner product.
#[derive(Clone, Debug)]
pub enum Hessian {
    Diagonal(Vec<f64>),
    /// Symmetric tridiagonal: `diag`, and `off[i]` coupling `i` and `i+1`.
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
    Dense(DMatrix<f64>),
}

impl Hessian {
    /// Solves `(H + s I) δ = rhs`.
    fn solve_shifted(&self, s: f64, rhs: &[f64]) -> Option<Vec<f64>> {
        match self {
            Hessian::Diagonal(d) => Some(rhs.iter().zip(d).map(|(r, di)| r / (di + s)).collect()),
            Hessian::Tridiagonal { diag, off } => {
                let dd: Vec<f64> = diag.iter().map(|v| v + s).collect();
                tridiag_solve(off, &dd, off, rhs)
            }
            Hessian::Dense(m) => {
                let n = m.nrows();
                let a = m + DMatrix::identity(n, n) * s;
                a.cholesky()
                    .map(|c| c.solve(&DVector::from_column_slice(rhs)).iter().copied().collect())
            }
        }
    }
}

/// A proper convex lower semicontinuous energy on a Hilbert space. Gradients and
/// Hessians are taken with respect to the space's inner product.
pub trait Energy: Send + Sync {
    fn name(&self) -> String;
    fn space(&self) -> &NormedSpace;
    /// `E(v)`, `+∞` off the effective domain.
    fn value(&self, v: &[f64]) -> f64;
    /// The subdifferential `∂E(v)`.
    fn subdifferential(&self, v: &[f64]) -> ValueSet;
    /// Closed-form proximal point `argmin E(v) + ‖v−x‖²/(2λ)`.
    fn prox(&self, _lambda: f64, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
    fn gradient(&self, _v: &[f64]) -> Option<Vec<f64>> {
        None
    }
    fn hessian(&self, _v: &[f64]) -> Option<Hessian> {
        None
    }
    fn in_closure(&self, _v: &[f64]) -> bool {
        true
    }
    fn exact_flow(&self, _t: f64, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
    /// `|∂E(v)| = N(v)` for a spectral seminorm `N` (quadratic energies).
    fn gradient_seminorm(&self) -> Option<&SpectralSeminorm> {
        None
    }
    /// `√E(v) = N(v)` for a spectral seminorm `N` (quadratic energies).
    fn sqrt_seminorm(&self) -> Option<&SpectralSeminorm> {
        None
    }
    fn subgradient_lipschitz(&self) -> Option<f64> {
        None
    }
    fn smooth(&self) -> bool {
        false
    }
    /// Closed-form bounds for `K(x,t) = inf ‖x−v‖ + t|∂E(v)|`.
    fn k_bounds(&self, x: &[f64], t: f64) -> Option<KBounds> {
        self.gradient_seminorm().map(|s| s.k_bounds(x, t))
    }
}

fn closed_form_k(value: f64, argmin: Vec<f64>) -> KBounds {
    KBounds {
        upper: value,
        lower: Some(value),
        argmin: Some(argmin),
        method: KMethod::ClosedForm,
    }
}

/// Options of the damped Newton proximal solver.
#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    /// Required residual `‖v + λ∇E(v) − x‖ ≤ tol·(1 + ‖x‖)`.
    pub tol: f64,
    pub max_newton: usize,
    pub max_gradient: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_newton: 100,
            max_gradient: 50_000,
        }
    }
}

fn moreau(e: &dyn Energy, lambda: f64, x: &[f64], v: &[f64]) -> f64 {
    let sp = e.space();
    let d = sp.dist(v, x);
    e.value(v) + d * d / (2.0 * lambda)
}

/// Minimizes `E(v) + ‖v−x‖²/(2λ)` by damped Newton with a gradient-descent fallback.
pub fn prox_newton(
    e: &dyn Energy,
    lambda: f64,
    x: &[f64],
    opts: &NewtonOptions,
) -> Result<Vec<f64>> {
    let sp = e.space();
    let inner = |a: &[f64], b: &[f64]| sp.inner(a, b).expect("Hilbert space");
    let tol = opts.tol * (1.0 + sp.norm(x));
    let grad_phi = |v: &[f64]| -> Option<Vec<f64>> {
        let g = e.gradient(v)?;
        Some((0..v.len()).map(|i| g[i] + (v[i] - x[i]) / lambda).collect())
    };
    let mut v = x.to_vec();
    let mut g = grad_phi(&v).ok_or_else(|| Error::Solver {
        message: format!("{} has no gradient at the starting point", e.name()),
        residual: f64::INFINITY,
        iterations: 0,
    })?;
    let mut res = lambda * sp.norm(&g);
    let mut prev = f64::INFINITY;
    let mut it = 0;
    while it < opts.max_newton {
        if res <= tol && (res <= 1e-15 * (1.0 + sp.norm(x)) || res > 0.5 * prev) {
            break;
        }
        it += 1;
        let Some(h) = e.hessian(&v) else { break };
        let rhs: Vec<f64> = g.iter().map(|gi| -gi).collect();
        let Some(delta) = h.solve_shifted(1.0 / lambda, &rhs) else { break };
        let slope = inner(&g, &delta);
        if !(slope < 0.0) {
            break;
        }
        let phi0 = moreau(e, lambda, x, &v);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = v.iter().zip(&delta).map(|(a, d)| a + alpha * d).collect();
            let phi = moreau(e, lambda, x, &cand);
            if phi <= phi0 + 1e-4 * alpha * slope || (alpha == 1.0 && phi <= phi0 + 1e-13 * phi0.abs())
            {
                accepted = Some(cand);
                break;
            }
            alpha *= 0.5;
        }
        let Some(cand) = accepted else { break };
        let Some(gn) = grad_phi(&cand) else { break };
        v = cand;
        g = gn;
        prev = res;
        res = lambda * sp.norm(&g);
    }
    if res <= tol {
        return Ok(v);
    }
    // gradient descent with backtracking
    let mut step = lambda;
    for k in 0..opts.max_gradient {
        let phi0 = moreau(e, lambda, x, &v);
        let gg = inner(&g, &g);
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = v.iter().zip(&g).map(|(a, d)| a - step * d).collect();
            if moreau(e, lambda, x, &cand) <= phi0 - 0.5 * step * gg {
                if let Some(gn) = grad_phi(&cand) {
                    v = cand;
                    g = gn;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        res = lambda * sp.norm(&g);
        if res <= tol {
            return Ok(v);
        }
        if !accepted {
            return Err(Error::Solver {
                message: format!("prox of {} stalled", e.name()),
                residual: res,
                iterations: it + k,
            });
        }
        step *= 2.0;
    }
    Err(Error::Solver {
        message: format!("prox of {} did not converge", e.name()),
        residual: res,
        iterations: it + opts.max_gradient,
    })
}

/// The subdifferential `∂E` of a convex energy, as an accretive operator of type 0.
#[derive(Clone)]
pub struct SubgradientOperator {
    energy: Arc<dyn Energy>,
    opts: NewtonOptions,
}

impl SubgradientOperator {
    pub fn new(energy: Arc<dyn Energy>) -> Self {
        SubgradientOperator {
            energy,
            opts: NewtonOptions::default(),
        }
    }

    pub fn with_options(mut self, opts: NewtonOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn energy_ref(&self) -> &Arc<dyn Energy> {
        &self.energy
    }
}

impl AccretiveOperator for SubgradientOperator {
    fn name(&self) -> String {
        format!("subgradient({})", self.energy.name())
    }
    fn space(&self) -> &NormedSpace {
        self.energy.space()
    }
    fn omega(&self) -> f64 {
        0.0
    }
    fn resolve_unchecked(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        if let Some(p) = self.energy.prox(lambda, x) {
            return Ok(p);
        }
        prox_newton(self.energy.as_ref(), lambda, x, &self.opts)
    }
    fn section(&self, x: &[f64]) -> ValueSet {
        self.energy.subdifferential(x)
    }
    fn in_closure(&self, x: &[f64]) -> bool {
        self.energy.in_closure(x)
    }
    fn energy(&self, x: &[f64]) -> Option<f64> {
        Some(self.energy.value(x))
    }
    fn exact_semigroup(&self, t: f64, x: &[f64]) -> Option<Vec<f64>> {
        self.energy.exact_flow(t, x)
    }
    fn k_certificate(&self, x: &[f64], t: f64) -> Option<KBounds> {
        self.energy.k_bounds(x, t)
    }
    fn set_norm_lipschitz(&self) -> Option<f64> {
        self.energy.subgradient_lipschitz()
    }
    fn single_valued(&self) -> bool {
        self.energy.smooth()
    }
}

/// `E(v) = k|v|` on `R`.
#[derive(Clone, Debug)]
pub struct AbsEnergy {
    k: f64,
    space: NormedSpace,
}

impl AbsEnergy {
    pub fn new(k: f64) -> Self {
        AbsEnergy {
            k,
            space: NormedSpace::euclidean(1),
        }
    }
}

impl Energy for AbsEnergy {
    fn name(&self) -> String {
        format!("abs(k={})", self.k)
    }
    fn space(&self) -> &NormedSpace {
        &self.space
    }
    fn value(&self, v: &[f64]) -> f64 {
        self.k * v[0].abs()
    }
    fn subdifferential(&self, v: &[f64]) -> ValueSet {
        if v[0] > 0.0 {
            ValueSet::Point(vec![self.k])
        } else if v[0] < 0.0 {
            ValueSet::Point(vec![-self.k])
        } else {
            ValueSet::Interval {
                lo: -self.k,
                hi: self.k,
            }
        }
    }
    fn prox(&self, lambda: f64, x: &[f64]) -> Option<Vec<f64>> {
        let s = lambda * self.k;
        Some(vec![x[0].signum() * (x[0].abs() - s).max(0.0)])
    }
    fn exact_flow(&self, t: f64, x: &[f64]) -> Option<Vec<f64>> {
        self.prox(t, x)
    }
    // v = 0 costs |x|; any v ≠ 0 costs at least tk, attained at v = x
    fn k_bounds(&self, x: &[f64], t: f64) -> Option<KBounds> {
        let (a, b) = (x[0].abs(), t * self.k);
        Some(if a <= b {
            closed_form_k(a, vec![0.0])
        } else {
            closed_form_k(b, x.to_vec())
        })
    }
}

/// `E(v) = k v²/2` on `R`.
#[derive(Clone, Debug)]
pub struct QuadraticEnergy {
    k: f64,
    space: NormedSpace,
    grad: SpectralSeminorm,
    root: SpectralSeminorm,
}

impl QuadraticEnergy {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Parameter(format!("quadratic energy needs k > 0, got {k}")));
        }
        let space = NormedSpace::euclidean(1);
        let q = DMatrix::identity(1, 1);
        let grad = SpectralSeminorm::new(q.clone(), vec![k], &space).expect("valid");
        let root = SpectralSeminorm::new(q, vec![(k / 2.0).sqrt()], &space).expect("valid");
        Ok(QuadraticEnergy {
            k,
            space,
            grad,
            root,
        })
    }
}

impl Energy for QuadraticEnergy {
    fn name(&self) -> String {
        format!("quadratic(k={})", self.k)
    }
    fn space(&self) -> &NormedSpace {
        &self.space
    }
    fn value(&self, v: &[f64]) -> f64 {
        0.5 * self.k * v[0] * v[0]
    }
    fn subdifferential(&self, v: &[f64]) -> ValueSet {
        ValueSet::Point(vec![self.k * v[0]])
    }
    fn prox(&self, lambda: f64, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![x[0] / (1.0 + lambda * self.k)])
    }
    fn gradient(&self, v: &[f64]) -> Option<Vec<f64>> {
        Some(vec![self.k * v[0]])
    }
    fn hessian(&self, _v: &[f64]) -> Option<Hessian> {
        Some(Hessian::Diagonal(vec![self.k]))
    }
    fn exact_flow(&self, t: f64, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![(-self.k * t).exp() * x[0]])
    }
    fn gradient_seminorm(&self) -> Option<&SpectralSeminorm> {
        Some(&self.grad)
    }
    fn sqrt_seminorm(&self) -> Option<&SpectralSeminorm> {
        Some(&self.root)
    }
    fn subgradient_lipschitz(&self) -> Option<f64> {
        Some(self.k)
    }
    fn smooth(&self) -> bool {
        true
    }
}

/// Indicator of `[-r, r]` on `R`: its subdifferential has the non-dense domain `[-r, r]`.
#[derive(Clone, Debug)]
pub struct IntervalIndicator {
    r: f64,
    space: NormedSpace,
}

impl IntervalIndicator {
    pub fn new(r: f64) -> Self {
        IntervalIndicator {
            r,
            space: NormedSpace::euclidean(1),
        }
    }
}

impl Energy for IntervalIndicator {
    fn name(&self) -> String {
        format!("indicator[-{r},{r}]", r = self.r)
    }
    fn space(&self) -> &NormedSpace {
        &self.space
    }
    fn value(&self, v: &[f64]) -> f64 {
        if v[0].abs() <= self.r {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn subdifferential(&self, v: &[f64]) -> ValueSet {
        let x = v[0];
        if x.abs() < self.r {
            ValueSet::Point(vec![0.0])
        } else if x == self.r {
            ValueSet::Interval {
                lo: 0.0,
                hi: f64::INFINITY,
            }
        } else if x == -self.r {
            ValueSet::Interval {
                lo: f64::NEG_INFINITY,
                hi: 0.0,
            }
        } else {
            ValueSet::Empty
        }
    }
    fn prox(&self, _lambda: f64, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![x[0].clamp(-self.r, self.r)])
    }
    fn in_closure(&self, v: &[f64]) -> bool {
        v[0].abs() <= self.r
    }
    fn exact_flow(&self, _t: f64, x: &[f64]) -> Option<Vec<f64>> {
        (x[0].abs() <= self.r).then(|| x.to_vec())
    }
    // every point of [-r, r] has a zero subgradient, so K is the distance to the interval
    fn k_bounds(&self, x: &[f64], _t: f64) -> Option<KBounds> {
        let p = x[0].clamp(-self.r, self.r);
        Some(closed_form_k((x[0] - p).abs(), vec![p]))
    }
}
