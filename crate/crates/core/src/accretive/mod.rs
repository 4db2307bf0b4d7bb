//! m-accretive operators of type ω described through their resolvents.
//!
//! An operator is given by `J_λ = (I + λA)^{-1}` (defined for `λω < 1`) and by the
//! set `Ax` at each point, from which the set norm `|Ax| = inf{‖f‖ : f ∈ Ax}` follows.

mod energy;
mod linear;
mod perturb;
mod qlaplace;
mod shifted;
mod config;
mod spectral;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use energy::{
    AbsEnergy, Energy, Hessian, IntervalIndicator, NewtonOptions, QuadraticEnergy,
    SubgradientOperator,
};
pub use linear::{MatrixOperator, ScalarLinear};
pub use perturb::{Domination, LipschitzMap, Perturbed, SinReaction, ZeroMap};
pub use qlaplace::{q_laplace, QLaplaceEnergy, QLaplaceOperator};
pub use shifted::ShiftedIdentity;
pub use config::{load_matrix_csv, OperatorConfig};
pub use spectral::SpectralSeminorm;

use crate::error::{Error, Result};
use crate::interpolation::KBounds;
use crate::normed::NormedSpace;

/// Shared handle to an operator.
pub type OpRef = Arc<dyn AccretiveOperator>;

/// The set `Ax` for the shipped operators.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueSet {
    Empty,
    Point(Vec<f64>),
    /// A closed interval in one dimension; endpoints may be infinite.
    Interval { lo: f64, hi: f64 },
}

impl ValueSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, ValueSet::Empty)
    }

    /// `inf{‖f‖ : f ∈ set}`, `+∞` for the empty set.
    pub fn min_norm(&self, space: &NormedSpace) -> f64 {
        match self {
            ValueSet::Empty => f64::INFINITY,
            ValueSet::Point(f) => space.norm(f),
            ValueSet::Interval { lo, hi } => {
                let m = if *lo <= 0.0 && *hi >= 0.0 {
                    0.0
                } else {
                    lo.abs().min(hi.abs())
                };
                space.norm(&[m])
            }
        }
    }

    /// The set `offset + scale·self` (`scale ≥ 0`).
    pub fn affine(&self, offset: &[f64], scale: f64) -> ValueSet {
        match self {
            ValueSet::Empty => ValueSet::Empty,
            ValueSet::Point(f) => {
                ValueSet::Point(offset.iter().zip(f).map(|(o, v)| o + scale * v).collect())
            }
            ValueSet::Interval { lo, hi } => {
                let o = offset[0];
                let map = |v: f64| if scale == 0.0 { o } else { o + scale * v };
                ValueSet::Interval {
                    lo: map(*lo),
                    hi: map(*hi),
                }
            }
        }
    }

    /// An element of minimal norm, when the set is nonempty and the minimum is attained.
    pub fn min_element(&self) -> Option<Vec<f64>> {
        match self {
            ValueSet::Empty => None,
            ValueSet::Point(f) => Some(f.clone()),
            ValueSet::Interval { lo, hi } => {
                let m = if *lo <= 0.0 && *hi >= 0.0 {
                    0.0
                } else if lo.abs() < hi.abs() {
                    *lo
                } else {
                    *hi
                };
                m.is_finite().then(|| vec![m])
            }
        }
    }
}

/// Position of a point relative to the domain of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainStatus {
    InDomain,
    InClosure,
    Outside,
}

/// An m-accretive operator of type `ω ≥ 0` on a finite-dimensional normed space.
pub trait AccretiveOperator: Send + Sync {
    fn name(&self) -> String;
    fn space(&self) -> &NormedSpace;
    fn omega(&self) -> f64;
    /// `J_λ x` for `λ > 0` with `λω < 1`; arguments are validated by [`resolve`].
    fn resolve_unchecked(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>>;
    /// The set `Ax`.
    fn section(&self, x: &[f64]) -> ValueSet;
    /// Whether `x` lies in the closure of the domain.
    fn in_closure(&self, _x: &[f64]) -> bool {
        true
    }
    /// Convex potential for subgradient operators.
    fn energy(&self, _x: &[f64]) -> Option<f64> {
        None
    }
    /// Closed-form `S(t)x` when available.
    fn exact_semigroup(&self, _t: f64, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
    /// Two-sided bounds for `K(x,t) = inf ‖x−v‖ + t|Av|` when the operator has enough
    /// structure (closed forms, symmetric linear maps).
    fn k_certificate(&self, _x: &[f64], _t: f64) -> Option<KBounds> {
        None
    }
    /// Lipschitz constant of `v ↦ |Av|` in Euclidean coordinates, if globally finite.
    fn set_norm_lipschitz(&self) -> Option<f64> {
        None
    }
    /// Whether `Ax` has at most one element everywhere.
    fn single_valued(&self) -> bool {
        true
    }
}

/// `J_λ x = (I + λA)^{-1} x`. `λ = 0` returns `x`.
pub fn resolve(op: &dyn AccretiveOperator, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
    op.space().check_dim(x)?;
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::Parameter(format!("resolvent parameter must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(x.to_vec());
    }
    if lambda * op.omega() >= 1.0 {
        return Err(Error::Parameter(format!(
            "resolvent needs lambda*omega < 1, got {lambda}*{} >= 1",
            op.omega()
        )));
    }
    op.resolve_unchecked(lambda, x)
}

/// Yosida approximation `A_λ x = (x − J_λ x)/λ`.
pub fn yosida(op: &dyn AccretiveOperator, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("Yosida parameter must be > 0, got {lambda}")));
    }
    let j = resolve(op, lambda, x)?;
    Ok(x.iter().zip(&j).map(|(a, b)| (a - b) / lambda).collect())
}

/// `|Ax|`, `+∞` off the domain.
pub fn set_norm(op: &dyn AccretiveOperator, x: &[f64]) -> f64 {
    op.section(x).min_norm(op.space())
}

/// `sup_λ ‖A_λ x‖` over `λ = 2^{-k}`: nondecreasing as `λ ↓ 0`, with limit `|Ax|`.
pub fn set_norm_via_yosida(op: &dyn AccretiveOperator, x: &[f64]) -> Result<f64> {
    let mut best: f64 = 0.0;
    for k in 0..=40 {
        let lambda = 2f64.powi(-k);
        if lambda * op.omega() >= 1.0 {
            continue;
        }
        let y = yosida(op, lambda, x)?;
        best = best.max(op.space().norm(&y) * (1.0 - lambda * op.omega()));
    }
    Ok(best)
}

pub fn domain_indicator(op: &dyn AccretiveOperator, x: &[f64]) -> DomainStatus {
    if !op.section(x).is_empty() {
        DomainStatus::InDomain
    } else if op.in_closure(x) {
        DomainStatus::InClosure
    } else {
        DomainStatus::Outside
    }
}

/// `‖J_λx − J_λy‖ ≤ ‖x−y‖/(1−λω)` evaluated as the ratio of the two sides.
pub fn resolvent_lipschitz_ratio(
    op: &dyn AccretiveOperator,
    lambda: f64,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let sp = op.space();
    let jx = resolve(op, lambda, x)?;
    let jy = resolve(op, lambda, y)?;
    let d = sp.dist(x, y);
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(sp.dist(&jx, &jy) * (1.0 - lambda * op.omega()) / d)
}

/// Residual `inf{‖v + λf − x‖ : f ∈ Av}` of a computed resolvent point `v`.
pub fn resolvent_residual(op: &dyn AccretiveOperator, lambda: f64, x: &[f64], v: &[f64]) -> f64 {
    let offset: Vec<f64> = v.iter().zip(x).map(|(a, b)| (a - b) / lambda).collect();
    lambda * op.section(v).affine(&offset, 1.0).min_norm(op.space())
}
