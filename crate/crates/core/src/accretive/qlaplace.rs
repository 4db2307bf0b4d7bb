use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::energy::{Energy, Hessian, SubgradientOperator};
use super::{AccretiveOperator, SpectralSeminorm, ValueSet};
use crate::error::{Error, Result};
use crate::interpolation::KBounds;
use crate::linalg::tridiag_solve;
use crate::normed::NormedSpace;

/// Dirichlet energy `E(u) = (1/q) Σ_{e=0}^{n} h |(u_{e+1} − u_e)/h|^q` on the interior
/// nodes of a uniform mesh of `(0,1)` with `u_0 = u_{n+1} = 0`, in discrete L² with
/// weight `h = 1/(n+1)`.
#[derive(Clone, Debug)]
pub struct QLaplaceEnergy {
    q: f64,
    n: usize,
    h: f64,
    space: NormedSpace,
    quadratic: Option<(SpectralSeminorm, SpectralSeminorm)>,
}

impl QLaplaceEnergy {
    pub fn new(q: f64, n: usize) -> Result<Self> {
        if !(q >= 2.0 && q.is_finite()) {
            return Err(Error::Parameter(format!("q-Laplacian needs q >= 2, got {q}")));
        }
        if n == 0 {
            return Err(Error::Parameter("q-Laplacian needs at least one interior node".into()));
        }
        let h = 1.0 / (n + 1) as f64;
        let space = NormedSpace::weighted_l2(n, h);
        let quadratic = if q == 2.0 {
            let (qm, lam) = dirichlet_eigen(n);
            let g = SpectralSeminorm::new(qm.clone(), lam.clone(), &space).expect("valid");
            let r = SpectralSeminorm::new(qm, lam.iter().map(|l| (l / 2.0).sqrt()).collect(), &space)
                .expect("valid");
            Some((g, r))
        } else {
            None
        };
        Ok(QLaplaceEnergy {
            q,
            n,
            h,
            space,
            quadratic,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Edge slopes `D_e = (u_{e+1} − u_e)/h`, `e = 0..=n`.
    fn slopes(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..=n)
            .map(|e| {
                let left = if e == 0 { 0.0 } else { u[e - 1] };
                let right = if e == n { 0.0 } else { u[e] };
                (right - left) / self.h
            })
            .collect()
    }

    fn phi(&self, s: f64) -> f64 {
        if self.q == 2.0 {
            s
        } else {
            s.abs().powf(self.q - 2.0) * s
        }
    }

    /// `−Δ_q u` in the discrete L² sense.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let d = self.slopes(u);
        (0..self.n)
            .map(|j| (self.phi(d[j]) - self.phi(d[j + 1])) / self.h)
            .collect()
    }

    /// Resolvent at `q = 2` by one tridiagonal solve of `(I + λL) v = x`.
    pub fn tridiagonal_resolvent(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        if self.q != 2.0 {
            return Err(Error::Parameter("tridiagonal resolvent needs q = 2".into()));
        }
        let c = lambda / (self.h * self.h);
        let diag = vec![1.0 + 2.0 * c; self.n];
        let off = vec![-c; self.n.saturating_sub(1)];
        tridiag_solve(&off, &diag, &off, x).ok_or_else(|| Error::Solver {
            message: "tridiagonal solve failed".into(),
            residual: f64::INFINITY,
            iterations: 0,
        })
    }

    /// Discrete Dirichlet eigenvalues `(4/h²) sin²(kπh/2)`, `k = 1..=n`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        dirichlet_eigen(self.n).1
    }
}

/// Orthonormal sine eigenvectors (columns) and eigenvalues of the Dirichlet Laplacian
/// `(1/h²) tridiag(−1, 2, −1)`.
fn dirichlet_eigen(n: usize) -> (DMatrix<f64>, Vec<f64>) {
    let h = 1.0 / (n + 1) as f64;
    let norm = (2.0 / (n + 1) as f64).sqrt();
    let q = DMatrix::from_fn(n, n, |j, k| {
        norm * (((k + 1) * (j + 1)) as f64 * PI * h).sin()
    });
    let lam = (1..=n)
        .map(|k| 4.0 / (h * h) * (k as f64 * PI * h / 2.0).sin().powi(2))
        .collect();
    (q, lam)
}

impl Energy for QLaplaceEnergy {
    fn name(&self) -> String {
        format!("dirichlet(q={},n={})", self.q, self.n)
    }
    fn space(&self) -> &NormedSpace {
        &self.space
    }
    fn value(&self, u: &[f64]) -> f64 {
        self.slopes(u)
            .iter()
            .map(|d| self.h * d.abs().powf(self.q))
            .sum::<f64>()
            / self.q
    }
    fn subdifferential(&self, u: &[f64]) -> ValueSet {
        ValueSet::Point(self.apply(u))
    }
    fn gradient(&self, u: &[f64]) -> Option<Vec<f64>> {
        Some(self.apply(u))
    }
    fn hessian(&self, u: &[f64]) -> Option<Hessian> {
        let d = self.slopes(u);
        let c: Vec<f64> = d
            .iter()
            .map(|s| {
                let w = if self.q == 2.0 {
                    1.0
                } else {
                    s.abs().powf(self.q - 2.0)
                };
                (self.q - 1.0) * w / (self.h * self.h)
            })
            .collect();
        let diag = (0..self.n).map(|j| c[j] + c[j + 1]).collect();
        let off = (0..self.n.saturating_sub(1)).map(|j| -c[j + 1]).collect();
        Some(Hessian::Tridiagonal { diag, off })
    }
    fn exact_flow(&self, t: f64, x: &[f64]) -> Option<Vec<f64>> {
        self.quadratic.as_ref()?;
        let (q, lam) = dirichlet_eigen(self.n);
        let c = q.transpose() * nalgebra::DVector::from_column_slice(x);
        let scaled = nalgebra::DVector::from_iterator(
            self.n,
            c.iter().zip(&lam).map(|(ci, l)| ci * (-l * t).exp()),
        );
        Some((q * scaled).iter().copied().collect())
    }
    fn gradient_seminorm(&self) -> Option<&SpectralSeminorm> {
        self.quadratic.as_ref().map(|(g, _)| g)
    }
    fn sqrt_seminorm(&self) -> Option<&SpectralSeminorm> {
        self.quadratic.as_ref().map(|(_, r)| r)
    }
    fn subgradient_lipschitz(&self) -> Option<f64> {
        (self.q == 2.0).then(|| self.h.sqrt() * 4.0 / (self.h * self.h))
    }
    fn smooth(&self) -> bool {
        true
    }
}

/// The negative discrete Dirichlet q-Laplacian `∂E`.
#[derive(Clone)]
pub struct QLaplaceOperator {
    energy: Arc<QLaplaceEnergy>,
    inner: SubgradientOperator,
}

impl QLaplaceOperator {
    pub fn energy(&self) -> &QLaplaceEnergy {
        &self.energy
    }
    pub fn q(&self) -> f64 {
        self.energy.q
    }
    pub fn n(&self) -> usize {
        self.energy.n
    }
    /// Mesh nodes `x_j = j h`, `j = 1..=n`.
    pub fn mesh(&self) -> Vec<f64> {
        (1..=self.energy.n).map(|j| j as f64 * self.energy.h).collect()
    }
}

/// Builds the q-Laplacian on `n` interior nodes.
pub fn q_laplace(q: f64, n: usize) -> Result<QLaplaceOperator> {
    let energy = Arc::new(QLaplaceEnergy::new(q, n)?);
    let inner = SubgradientOperator::new(energy.clone());
    Ok(QLaplaceOperator { energy, inner })
}

impl AccretiveOperator for QLaplaceOperator {
    fn name(&self) -> String {
        format!("qlaplace(q={},n={})", self.energy.q, self.energy.n)
    }
    fn space(&self) -> &NormedSpace {
        &self.energy.space
    }
    fn omega(&self) -> f64 {
        0.0
    }
    fn resolve_unchecked(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.inner.resolve_unchecked(lambda, x)
    }
    fn section(&self, x: &[f64]) -> ValueSet {
        self.inner.section(x)
    }
    fn energy(&self, x: &[f64]) -> Option<f64> {
        Some(self.energy.value(x))
    }
    fn exact_semigroup(&self, t: f64, x: &[f64]) -> Option<Vec<f64>> {
        self.energy.exact_flow(t, x)
    }
    fn k_certificate(&self, x: &[f64], t: f64) -> Option<KBounds> {
        self.inner.k_certificate(x, t)
    }
    fn set_norm_lipschitz(&self) -> Option<f64> {
        self.energy.subgradient_lipschitz()
    }
}
