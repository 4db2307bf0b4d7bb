use std::sync::Arc;

use super::{resolve, AccretiveOperator, OpRef, ValueSet};
use crate::error::{Error, Result};
use crate::normed::NormedSpace;

/// A single-valued globally Lipschitz map `B` on the operator's space.
pub trait LipschitzMap: Send + Sync {
    fn name(&self) -> String;
    fn apply(&self, v: &[f64]) -> Vec<f64>;
    /// Lipschitz constant with respect to any lattice norm on `R^n`.
    fn lipschitz(&self) -> f64;
}

/// `B(v)_i = c sin(v_i)`.
#[derive(Clone, Copy, Debug)]
pub struct SinReaction {
    pub c: f64,
}

impl LipschitzMap for SinReaction {
    fn name(&self) -> String {
        format!("sin(c={})", self.c)
    }
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.iter().map(|x| self.c * x.sin()).collect()
    }
    fn lipschitz(&self) -> f64 {
        self.c.abs()
    }
}

/// `B ≡ 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroMap;

impl LipschitzMap for ZeroMap {
    fn name(&self) -> String {
        "zero".into()
    }
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        vec![0.0; v.len()]
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
}

/// Domination `|Bx| ≤ a|Ax| + b(‖x‖)` with `b(r) = b0 + b1·r`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Domination {
    pub a: f64,
    pub b0: f64,
    pub b1: f64,
}

impl Domination {
    pub fn new(a: f64, b0: f64, b1: f64) -> Result<Self> {
        if !(a > 0.0) || !(b0 >= 0.0) || !(b1 >= 0.0) {
            return Err(Error::Parameter(format!(
                "domination needs a > 0, b0 >= 0, b1 >= 0, got a={a}, b0={b0}, b1={b1}"
            )));
        }
        Ok(Domination { a, b0, b1 })
    }

    /// Certificate for a map with `‖Bx‖ ≤ L‖x‖`: any `a > 0` with `b(r) = L r`.
    pub fn linear_growth(a: f64, lipschitz: f64) -> Result<Self> {
        Self::new(a, 0.0, lipschitz)
    }

    pub fn b(&self, r: f64) -> f64 {
        self.b0 + self.b1 * r
    }

    /// Whether `b_norm ≤ a·a_norm + b(x_norm)` up to a relative tolerance.
    pub fn holds(&self, b_norm: f64, a_norm: f64, x_norm: f64, rel_tol: f64) -> bool {
        let rhs = self.a * a_norm + self.b(x_norm);
        b_norm <= rhs + rel_tol * (1.0 + rhs)
    }

    /// Domination of `−B` by `A + B` for single-valued `B`, available for `a < 1`:
    /// `|Bx| ≤ a/(1−a)·|(A+B)x| + b(‖x‖)/(1−a)`.
    pub fn reversed(&self) -> Result<Self> {
        if self.a >= 1.0 {
            return Err(Error::Hypothesis(format!(
                "reverse domination needs a < 1, got a = {}",
                self.a
            )));
        }
        let s = 1.0 / (1.0 - self.a);
        Ok(Domination {
            a: self.a * s,
            b0: self.b0 * s,
            b1: self.b1 * s,
        })
    }
}

/// The sum `A + B` of an accretive operator of type `ω_A` and a Lipschitz map with
/// constant `L`; it is accretive of type `ω_A + L`.
#[derive(Clone)]
pub struct Perturbed {
    base: OpRef,
    map: Arc<dyn LipschitzMap>,
    omega: f64,
    tol: f64,
}

impl Perturbed {
    pub fn new(base: OpRef, map: Arc<dyn LipschitzMap>) -> Self {
        let omega = base.omega() + map.lipschitz();
        Perturbed {
            base,
            map,
            omega,
            tol: 1e-12,
        }
    }

    pub fn base(&self) -> &OpRef {
        &self.base
    }

    pub fn map(&self) -> &Arc<dyn LipschitzMap> {
        &self.map
    }

    /// `Bv`.
    pub fn perturbation(&self, v: &[f64]) -> Vec<f64> {
        self.map.apply(v)
    }

    fn scalar_bisection(&self, lambda: f64, x: f64) -> Result<Vec<f64>> {
        // g(v) = v + λ(Av + Bv) − x is strictly increasing for λω < 1
        let g = |v: f64| -> Result<f64> {
            let a = match self.base.section(&[v]) {
                ValueSet::Point(f) => f[0],
                _ => {
                    return Err(Error::Structural(
                        "scalar bisection needs a single-valued base operator".into(),
                    ))
                }
            };
            Ok(v + lambda * (a + self.map.apply(&[v])[0]) - x)
        };
        let mut r = 1.0 + x.abs();
        let (mut lo, mut hi) = (-r, r);
        for _ in 0..200 {
            if g(lo)? <= 0.0 && g(hi)? >= 0.0 {
                break;
            }
            r *= 2.0;
            lo = -r;
            hi = r;
        }
        if !(g(lo)? <= 0.0 && g(hi)? >= 0.0) {
            return Err(Error::Solver {
                message: "no sign change for the scalar resolvent equation".into(),
                residual: f64::INFINITY,
                iterations: 200,
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if g(mid)? <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = if g(lo)?.abs() <= g(hi)?.abs() { lo } else { hi };
        Ok(vec![v])
    }

    fn splitting(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        let factor = lambda * self.map.lipschitz() / (1.0 - lambda * self.base.omega());
        if factor >= 1.0 {
            return Err(Error::Solver {
                message: format!("splitting is not a contraction (factor {factor})"),
                residual: f64::INFINITY,
                iterations: 0,
            });
        }
        let sp = self.base.space();
        let mut v = resolve(self.base.as_ref(), lambda, x)?;
        let mut step = f64::INFINITY;
        for it in 0..10_000 {
            let b = self.map.apply(&v);
            let shifted: Vec<f64> = x.iter().zip(&b).map(|(a, bi)| a - lambda * bi).collect();
            let next = resolve(self.base.as_ref(), lambda, &shifted)?;
            step = sp.dist(&next, &v);
            v = next;
            // distance to the fixed point is at most step·factor/(1−factor)
            if step * factor / (1.0 - factor) <= self.tol * (1.0 + sp.norm(x)) || step == 0.0 {
                return Ok(v);
            }
            if it > 50 && !step.is_finite() {
                break;
            }
        }
        Err(Error::Solver {
            message: "resolvent splitting did not converge".into(),
            residual: step,
            iterations: 10_000,
        })
    }
}

impl AccretiveOperator for Perturbed {
    fn name(&self) -> String {
        format!("{}+{}", self.base.name(), self.map.name())
    }
    fn space(&self) -> &NormedSpace {
        self.base.space()
    }
    fn omega(&self) -> f64 {
        self.omega
    }
    fn resolve_unchecked(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        if self.map.lipschitz() == 0.0 {
            return self.base.resolve_unchecked(lambda, x);
        }
        if x.len() == 1 && self.base.single_valued() {
            self.scalar_bisection(lambda, x[0])
        } else {
            self.splitting(lambda, x)
        }
    }
    fn section(&self, x: &[f64]) -> ValueSet {
        self.base.section(x).affine(&self.map.apply(x), 1.0)
    }
    fn in_closure(&self, x: &[f64]) -> bool {
        self.base.in_closure(x)
    }
    fn set_norm_lipschitz(&self) -> Option<f64> {
        self.base
            .set_norm_lipschitz()
            .map(|l| l + self.map.lipschitz() * self.space().lipschitz())
    }
    fn single_valued(&self) -> bool {
        self.base.single_valued()
    }
}
