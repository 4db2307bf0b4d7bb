use nalgebra::{DMatrix, DVector};

use crate::interpolation::{KBounds, KMethod};
use crate::normed::{NormKind, NormedSpace};

/// A seminorm `N(v) = ‖Q diag(d) Qᵀ v‖` on a Hilbert space with uniform weight, where
/// `Q` is orthogonal in Euclidean coordinates and `d ≥ 0`.
///
/// For the couple `(‖·‖, N)` the minimizer of `‖x−v‖ + tN(v)` lies on the path
/// `v(μ) = (I + μ D²)^{-1} x`, and a feasible dual vector gives a lower bound, so the
/// K-function is bracketed from both sides.
#[derive(Clone, Debug)]
pub struct SpectralSeminorm {
    q: DMatrix<f64>,
    d: Vec<f64>,
    scale: f64,
}

impl SpectralSeminorm {
    /// `q` orthogonal (columns are eigenvectors), `d` the multipliers, `space` Euclidean
    /// or uniformly weighted L².
    pub fn new(q: DMatrix<f64>, d: Vec<f64>, space: &NormedSpace) -> Option<Self> {
        let scale = match space.kind {
            NormKind::Euclidean => 1.0,
            NormKind::WeightedL2 { h } => h.sqrt(),
            _ => return None,
        };
        if q.nrows() != d.len() || q.ncols() != d.len() || d.iter().any(|v| !(*v >= 0.0)) {
            return None;
        }
        Some(SpectralSeminorm { q, d, scale })
    }

    /// From a symmetric matrix `m`: `N(v) = ‖m v‖`.
    pub fn from_symmetric(m: &DMatrix<f64>, space: &NormedSpace) -> Option<Self> {
        let eig = m.clone().symmetric_eigen();
        let d = eig.eigenvalues.iter().map(|l| l.abs()).collect();
        Self::new(eig.eigenvectors, d, space)
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.d
    }

    /// Lipschitz constant in Euclidean coordinates.
    pub fn lipschitz(&self) -> f64 {
        self.scale * self.d.iter().cloned().fold(0.0, f64::max)
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        let c = self.q.transpose() * DVector::from_column_slice(v);
        self.scale
            * c.iter()
                .zip(&self.d)
                .map(|(ci, di)| (ci * di).powi(2))
                .sum::<f64>()
                .sqrt()
    }

    fn path_cost(&self, c: &[f64], t: f64, mu: f64) -> (f64, Vec<f64>) {
        let mut r2 = 0.0;
        let mut n2 = 0.0;
        let mut v = vec![0.0; c.len()];
        for k in 0..c.len() {
            let d2 = self.d[k] * self.d[k];
            let vk = if mu.is_infinite() {
                if d2 == 0.0 {
                    c[k]
                } else {
                    0.0
                }
            } else {
                c[k] / (1.0 + mu * d2)
            };
            v[k] = vk;
            r2 += (c[k] - vk).powi(2);
            n2 += (self.d[k] * vk).powi(2);
        }
        (r2.sqrt() + t * n2.sqrt(), v)
    }

    /// Bounds for `inf_v ‖x−v‖ + t N(v)`.
    pub fn k_bounds(&self, x: &[f64], t: f64) -> KBounds {
        let c: Vec<f64> = (self.q.transpose() * DVector::from_column_slice(x))
            .iter()
            .copied()
            .collect();
        let dmax = self.d.iter().cloned().fold(0.0, f64::max);
        let dmin = self
            .d
            .iter()
            .cloned()
            .filter(|v| *v > 0.0)
            .fold(f64::INFINITY, f64::min);
        let mut best = self.path_cost(&c, t, 0.0);
        let mut best_mu = 0.0;
        let inf_cost = self.path_cost(&c, t, f64::INFINITY);
        if inf_cost.0 < best.0 {
            best = inf_cost;
            best_mu = f64::INFINITY;
        }
        if dmax > 0.0 {
            let lo = (1e-10 / (dmax * dmax)).ln();
            let hi = (1e10 / (dmin * dmin)).ln();
            let m = 400;
            let mut best_i = None;
            for i in 0..=m {
                let mu = (lo + (hi - lo) * i as f64 / m as f64).exp();
                let cand = self.path_cost(&c, t, mu);
                if cand.0 < best.0 {
                    best = cand;
                    best_mu = mu;
                    best_i = Some(i);
                }
            }
            if let Some(i) = best_i {
                // golden-section refinement in log μ around the best grid point
                let step = (hi - lo) / m as f64;
                let (mut a, mut b) = (lo + step * (i as f64 - 1.0), lo + step * (i as f64 + 1.0));
                let g = 0.5 * (5f64.sqrt() - 1.0);
                let f = |u: f64| self.path_cost(&c, t, u.exp());
                let mut x1 = b - g * (b - a);
                let mut x2 = a + g * (b - a);
                let (mut f1, mut f2) = (f(x1), f(x2));
                for _ in 0..80 {
                    if f1.0 < f2.0 {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - g * (b - a);
                        f1 = f(x1);
                    } else {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + g * (b - a);
                        f2 = f(x2);
                    }
                }
                for (u, cand) in [(x1, f1), (x2, f2)] {
                    if cand.0 < best.0 {
                        best = cand;
                        best_mu = u.exp();
                    }
                }
            }
        }
        let _ = best_mu;
        let (upper2, v) = best;
        // dual vectors y with |y| ≤ 1 and |D⁺y| ≤ t, y ⊥ ker D
        let feasible_value = |y: &mut Vec<f64>| -> f64 {
            for k in 0..y.len() {
                if self.d[k] == 0.0 {
                    y[k] = 0.0;
                }
            }
            let ny = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            if ny == 0.0 {
                return 0.0;
            }
            if ny > 1.0 {
                y.iter_mut().for_each(|a| *a /= ny);
            }
            let s = y
                .iter()
                .zip(&self.d)
                .filter(|(_, d)| **d > 0.0)
                .map(|(a, d)| (a / d).powi(2))
                .sum::<f64>()
                .sqrt();
            if s > t {
                let f = t / s;
                y.iter_mut().for_each(|a| *a *= f);
            }
            y.iter().zip(&c).map(|(a, b)| a * b).sum()
        };
        let mut lower2: f64 = 0.0;
        let r: Vec<f64> = c.iter().zip(&v).map(|(a, b)| a - b).collect();
        let nr = r.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nr > 0.0 {
            let mut y: Vec<f64> = r.iter().map(|a| a / nr).collect();
            lower2 = lower2.max(feasible_value(&mut y));
        }
        let dv: Vec<f64> = v.iter().zip(&self.d).map(|(a, d)| a * d).collect();
        let ndv = dv.iter().map(|a| a * a).sum::<f64>().sqrt();
        if ndv > 0.0 {
            let mut y: Vec<f64> = dv
                .iter()
                .zip(&self.d)
                .map(|(a, d)| t * d * a / ndv)
                .collect();
            lower2 = lower2.max(feasible_value(&mut y));
        }
        let argmin = (&self.q * DVector::from_vec(v)).iter().copied().collect();
        KBounds {
            upper: self.scale * upper2,
            lower: Some((self.scale * lower2).min(self.scale * upper2)),
            argmin: Some(argmin),
            method: KMethod::Certificate,
        }
    }
}
