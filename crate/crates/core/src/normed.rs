//! Finite-dimensional normed spaces and the Kato bracket.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm kinds on `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum NormKind {
    Euclidean,
    Max,
    /// `sqrt(h Σ v_i²)`: discrete L² on a uniform mesh of width `h`.
    WeightedL2 { h: f64 },
    /// `Σ w_i |v_i|` over cells of widths `w_i`.
    CellL1 { widths: Vec<f64> },
    /// `max |v_i|` over cells (same as `Max`, kept to record the partition).
    CellLinf { widths: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormedSpace {
    pub dim: usize,
    pub kind: NormKind,
}

impl NormedSpace {
    pub fn euclidean(dim: usize) -> Self {
        NormedSpace {
            dim,
            kind: NormKind::Euclidean,
        }
    }
    pub fn max_norm(dim: usize) -> Self {
        NormedSpace {
            dim,
            kind: NormKind::Max,
        }
    }
    pub fn weighted_l2(dim: usize, h: f64) -> Self {
        NormedSpace {
            dim,
            kind: NormKind::WeightedL2 { h },
        }
    }
    /// Discrete L¹ on the partition of (0,1) into `dim` equal cells.
    pub fn cell_l1_uniform(dim: usize) -> Self {
        NormedSpace {
            dim,
            kind: NormKind::CellL1 {
                widths: vec![1.0 / dim as f64; dim],
            },
        }
    }
    pub fn cell_linf_uniform(dim: usize) -> Self {
        NormedSpace {
            dim,
            kind: NormKind::CellLinf {
                widths: vec![1.0 / dim as f64; dim],
            },
        }
    }

    pub fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Structural(format!(
                "vector of length {} in a space of dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormKind::Max | NormKind::CellLinf { .. } => {
                v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
            }
            NormKind::WeightedL2 { h } => (h * v.iter().map(|x| x * x).sum::<f64>()).sqrt(),
            NormKind::CellL1 { widths } => v.iter().zip(widths).map(|(x, w)| w * x.abs()).sum(),
        }
    }

    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.norm(&d)
    }

    /// Inner product for the Hilbert kinds.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> Option<f64> {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        match self.kind {
            NormKind::Euclidean => Some(dot),
            NormKind::WeightedL2 { h } => Some(h * dot),
            _ => None,
        }
    }

    pub fn is_hilbert(&self) -> bool {
        matches!(self.kind, NormKind::Euclidean | NormKind::WeightedL2 { .. })
    }

    /// Largest `c` with `‖z‖ ≥ c |z|₂`.
    pub fn coercivity(&self) -> f64 {
        match &self.kind {
            NormKind::Euclidean => 1.0,
            NormKind::Max | NormKind::CellLinf { .. } => 1.0 / (self.dim as f64).sqrt(),
            NormKind::WeightedL2 { h } => h.sqrt(),
            NormKind::CellL1 { widths } => widths.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    /// Smallest `L` with `‖z‖ ≤ L |z|₂`.
    pub fn lipschitz(&self) -> f64 {
        match &self.kind {
            NormKind::Euclidean | NormKind::Max | NormKind::CellLinf { .. } => 1.0,
            NormKind::WeightedL2 { h } => h.sqrt(),
            NormKind::CellL1 { widths } => widths.iter().map(|w| w * w).sum::<f64>().sqrt(),
        }
    }

    /// `(‖x+λy‖ − ‖x‖)/λ` evaluated without cancellation.
    pub fn bracket_quotient(&self, x: &[f64], y: &[f64], lambda: f64) -> f64 {
        let pair_delta = |xi: f64, yi: f64| -> f64 {
            // (|xi + λ yi| − |xi|)/λ
            let z = xi + lambda * yi;
            let den = z.abs() + xi.abs();
            if den == 0.0 {
                0.0
            } else {
                yi * (2.0 * xi + lambda * yi) / den
            }
        };
        match &self.kind {
            NormKind::Euclidean | NormKind::WeightedL2 { .. } => {
                let h = match self.kind {
                    NormKind::WeightedL2 { h } => h,
                    _ => 1.0,
                };
                let nx = self.norm(x);
                let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + lambda * b).collect();
                let nz = self.norm(&z);
                if nx + nz == 0.0 {
                    return 0.0;
                }
                let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() * h;
                let yy: f64 = y.iter().map(|b| b * b).sum::<f64>() * h;
                (2.0 * xy + lambda * yy) / (nx + nz)
            }
            NormKind::Max | NormKind::CellLinf { .. } => {
                let m = self.norm(x);
                x.iter()
                    .zip(y)
                    .map(|(&a, &b)| (a.abs() - m) / lambda + pair_delta(a, b))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
            NormKind::CellL1 { widths } => x
                .iter()
                .zip(y)
                .zip(widths)
                .map(|((&a, &b), w)| w * pair_delta(a, b))
                .sum(),
        }
    }
}

/// Result of a Kato bracket evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct KatoBracket {
    pub value: f64,
    pub quotients: Vec<f64>,
    /// Whether the quotient sequence is nonincreasing up to rounding.
    pub monotone: bool,
}

/// `λ_k = 2^{-k}`, `k = 4..=40`.
pub fn default_lambda_seq() -> Vec<f64> {
    (4..=40).map(|k| 2f64.powi(-k)).collect()
}

/// `[x, y] = lim_{λ↓0} (‖x+λy‖ − ‖x‖)/λ` along a decreasing `λ` sequence.
pub fn kato_bracket(space: &NormedSpace, x: &[f64], y: &[f64], lambda_seq: &[f64]) -> KatoBracket {
    let quotients: Vec<f64> = lambda_seq
        .iter()
        .map(|&l| space.bracket_quotient(x, y, l))
        .collect();
    let scale = space.norm(y).max(1e-300);
    let monotone = quotients
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-12 * scale);
    let value = quotients
        .last()
        .copied()
        .unwrap_or_else(|| space.bracket_quotient(x, y, 1e-8));
    KatoBracket {
        value,
        quotients,
        monotone,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_examples() {
        let e = NormedSpace::euclidean(2);
        let b = kato_bracket(&e, &[1.0, 0.0], &[0.0, 1.0], &default_lambda_seq());
        assert!(b.value.abs() < 1e-11 && b.monotone);
        let m = NormedSpace::max_norm(2);
        let b = kato_bracket(&m, &[1.0, 1.0], &[1.0, -1.0], &default_lambda_seq());
        assert!((b.value - 1.0).abs() < 1e-12 && b.monotone);
    }

    #[test]
    fn bracket_at_zero_is_norm_of_direction() {
        let e = NormedSpace::weighted_l2(3, 0.25);
        let y = [1.0, -2.0, 0.5];
        let b = kato_bracket(&e, &[0.0; 3], &y, &default_lambda_seq());
        assert!((b.value - e.norm(&y)).abs() < 1e-12);
    }
}
