use super::{resolve, AccretiveOperator, OpRef, ValueSet};
use crate::error::{Error, Result};
use crate::normed::NormedSpace;

/// `C = I + hA` for `A` accretive of type `ω` with `hω < 1`. `C` is accretive of type 0
/// and surjective, with `C⁻¹(0) = J^A_h 0`.
#[derive(Clone)]
pub struct ShiftedIdentity {
    base: OpRef,
    h: f64,
}

impl ShiftedIdentity {
    pub fn new(base: OpRef, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Parameter(format!("h must be > 0, got {h}")));
        }
        if h * base.omega() >= 1.0 {
            return Err(Error::Parameter(format!(
                "I + hA needs h*omega < 1, got {h}*{} >= 1",
                base.omega()
            )));
        }
        Ok(ShiftedIdentity { base, h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn base(&self) -> &OpRef {
        &self.base
    }

    /// The point `v₀` with `0 ∈ v₀ + hAv₀`.
    pub fn zero_preimage(&self) -> Result<Vec<f64>> {
        resolve(self.base.as_ref(), self.h, &vec![0.0; self.base.space().dim])
    }
}

impl AccretiveOperator for ShiftedIdentity {
    fn name(&self) -> String {
        format!("I+{}*{}", self.h, self.base.name())
    }
    fn space(&self) -> &NormedSpace {
        self.base.space()
    }
    fn omega(&self) -> f64 {
        0.0
    }
    fn resolve_unchecked(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        // v + λ(v + hAv) ∋ x  ⇔  v = J^A_{λh/(1+λ)}(x/(1+λ))
        let y: Vec<f64> = x.iter().map(|v| v / (1.0 + lambda)).collect();
        resolve(self.base.as_ref(), lambda * self.h / (1.0 + lambda), &y)
    }
    fn section(&self, x: &[f64]) -> ValueSet {
        self.base.section(x).affine(x, self.h)
    }
    fn in_closure(&self, x: &[f64]) -> bool {
        self.base.in_closure(x)
    }
    fn set_norm_lipschitz(&self) -> Option<f64> {
        self.base
            .set_norm_lipschitz()
            .map(|l| self.space().lipschitz() + self.h * l)
    }
    fn single_valued(&self) -> bool {
        self.base.single_valued()
    }
}
