use nalgebra::{DMatrix, DVector};

use super::{AccretiveOperator, SpectralSeminorm, ValueSet};
use crate::error::{Error, Result};
use crate::interpolation::{KBounds, KMethod};
use crate::normed::NormedSpace;

/// `A = c·id` on `R` with the absolute value, of type `ω`.
///
/// `ScalarLinear::new(a)` is `a·id` (type 0); `ScalarLinear::shifted(a, ω)` is
/// `(a − ω)·id`, accretive of type `ω`.
#[derive(Clone, Debug)]
pub struct ScalarLinear {
    c: f64,
    omega: f64,
    space: NormedSpace,
}

impl ScalarLinear {
    pub fn new(a: f64) -> Result<Self> {
        Self::shifted(a, 0.0)
    }

    pub fn shifted(a: f64, omega: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) || !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::Parameter(format!(
                "scalar operator needs a >= 0 and omega >= 0, got a={a}, omega={omega}"
            )));
        }
        Ok(ScalarLinear {
            c: a - omega,
            omega,
            space: NormedSpace::euclidean(1),
        })
    }

    /// The coefficient `c` with `Ax = c x`.
    pub fn coefficient(&self) -> f64 {
        self.c
    }
}

impl AccretiveOperator for ScalarLinear {
    fn name(&self) -> String {
        if self.omega == 0.0 {
            format!("scalar(a={})", self.c)
        } else {
            format!("scalar(a={},omega={})", self.c + self.omega, self.omega)
        }
    }
    fn space(&self) -> &NormedSpace {
        &self.space
    }
    fn omega(&self) -> f64 {
        self.omega
    }
    fn resolve_unchecked(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![x[0] / (1.0 + lambda * self.c)])
    }
    fn section(&self, x: &[f64]) -> ValueSet {
        ValueSet::Point(vec![self.c * x[0]])
    }
    fn exact_semigroup(&self, t: f64, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![(-self.c * t).exp() * x[0]])
    }
    fn k_certificate(&self, x: &[f64], t: f64) -> Option<KBounds> {
        // inf_v |x−v| + t|c||v| is attained at v = x or v = 0
        let ax = x[0].abs();
        let (k, v) = if t * self.c.abs() <= 1.0 {
            (t * self.c.abs() * ax, x[0])
        } else {
            (ax, 0.0)
        };
        Some(KBounds {
            upper: k,
            lower: Some(k),
            argmin: Some(vec![v]),
            method: KMethod::ClosedForm,
        })
    }
    fn set_norm_lipschitz(&self) -> Option<f64> {
        Some(self.c.abs())
    }
}

/// A linear operator `x ↦ M x` on `R^n` with a Euclidean or uniformly weighted L² norm.
#[derive(Clone, Debug)]
pub struct MatrixOperator {
    m: DMatrix<f64>,
    omega: f64,
    space: NormedSpace,
    label: String,
    eigen: Option<(DMatrix<f64>, Vec<f64>)>,
    spectral: Option<SpectralSeminorm>,
    op_norm: f64,
}

impl MatrixOperator {
    /// Validates accretivity of type `omega` through the symmetric part of `M`
    /// (Hilbert norms only).
    pub fn new(m: DMatrix<f64>, omega: f64, space: NormedSpace) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() != space.dim {
            return Err(Error::Structural(format!(
                "matrix of shape {}x{} on a space of dimension {}",
                m.nrows(),
                m.ncols(),
                space.dim
            )));
        }
        if !(omega >= 0.0) {
            return Err(Error::Parameter(format!("omega must be >= 0, got {omega}")));
        }
        if !space.is_hilbert() {
            return Err(Error::Parameter(
                "matrix operators are shipped on Euclidean or weighted L2 spaces".into(),
            ));
        }
        let sym = (&m + m.transpose()) * 0.5;
        let min_eig = sym
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        if min_eig < -omega - 1e-10 * scale {
            return Err(Error::Precondition(format!(
                "matrix is not accretive of type {omega}: symmetric part has eigenvalue {min_eig}"
            )));
        }
        let symmetric = (&m - m.transpose()).amax() <= 1e-12 * scale;
        let (eigen, spectral) = if symmetric {
            let e = sym.clone().symmetric_eigen();
            let vals: Vec<f64> = e.eigenvalues.iter().copied().collect();
            let sp = SpectralSeminorm::from_symmetric(&sym, &space);
            (Some((e.eigenvectors, vals)), sp)
        } else {
            (None, None)
        };
        let op_norm = m.clone().svd(false, false).singular_values.amax();
        Ok(MatrixOperator {
            label: format!("matrix({}x{})", m.nrows(), m.ncols()),
            m,
            omega,
            space,
            eigen,
            spectral,
            op_norm,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Eigenvectors (columns) and eigenvalues for symmetric matrices.
    pub fn eigen(&self) -> Option<(&DMatrix<f64>, &[f64])> {
        self.eigen.as_ref().map(|(q, l)| (q, l.as_slice()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.eigen.is_some()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (&self.m * DVector::from_column_slice(x)).iter().copied().collect()
    }
}

impl AccretiveOperator for MatrixOperator {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn space(&self) -> &NormedSpace {
        &self.space
    }
    fn omega(&self) -> f64 {
        self.omega
    }
    fn resolve_unchecked(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        let n = x.len();
        let a = DMatrix::identity(n, n) + &self.m * lambda;
        let b = DVector::from_column_slice(x);
        let sol = a.lu().solve(&b).ok_or_else(|| Error::Solver {
            message: "singular resolvent system".into(),
            residual: f64::INFINITY,
            iterations: 0,
        })?;
        Ok(sol.iter().copied().collect())
    }
    fn section(&self, x: &[f64]) -> ValueSet {
        ValueSet::Point(self.apply(x))
    }
    fn exact_semigroup(&self, t: f64, x: &[f64]) -> Option<Vec<f64>> {
        let (q, l) = self.eigen.as_ref()?;
        let c = q.transpose() * DVector::from_column_slice(x);
        let scaled = DVector::from_iterator(
            c.len(),
            c.iter().zip(l).map(|(ci, li)| ci * (-li * t).exp()),
        );
        Some((q * scaled).iter().copied().collect())
    }
    fn k_certificate(&self, x: &[f64], t: f64) -> Option<KBounds> {
        self.spectral.as_ref().map(|s| s.k_bounds(x, t))
    }
    fn set_norm_lipschitz(&self) -> Option<f64> {
        Some(self.space.lipschitz() * self.op_norm)
    }
}
