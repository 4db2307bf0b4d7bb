//! K-functionals of classical and operator couples: the (L¹, L∞) couple against its
//! rearrangement formula, and the accretive couple (‖·‖, |A·|) with certified bounds.
//!
//! `cargo run --release --example k_functional`

use std::sync::Arc;

use nonlin_interp::accretive::{q_laplace, AbsEnergy, ScalarLinear, SubgradientOperator};
use nonlin_interp::harness::random_smooth_vector;
use nonlin_interp::interpolation::{k_function, AccretiveCouple, RearrangementCouple};

fn main() -> nonlin_interp::Result<()> {
    // K(f, t; L¹, L∞) = ∫₀ᵗ f*(s) ds on the uniform partition of (0,1)
    let f = [0.3, -2.0, 1.1, 0.0, 0.7];
    let couple = RearrangementCouple::new(f.len())?;
    for t in [0.1, 0.25, 0.6, 1.0] {
        let k = k_function(&couple, &f, t)?;
        let (brute, _) = couple.truncation_brute_force(&f, t);
        println!(
            "(L1,Linf) t={t:<5} K={:.12} rearrangement={:.12} truncation={:.12}",
            k.upper,
            couple.rearrangement_integral(&f, t),
            brute
        );
    }

    // A = a·id: K(x,t) = inf |x−v| + ta|v| = |x|·min(1, at)
    let a = 2.0;
    let lin = AccretiveCouple::new(Arc::new(ScalarLinear::new(a)?));
    let abs = AccretiveCouple::new(Arc::new(SubgradientOperator::new(Arc::new(AbsEnergy::new(1.0)))));
    for t in [0.1, 1.0, 10.0] {
        let k = k_function(&lin, &[1.5], t)?;
        let kabs = k_function(&abs, &[1.5], t)?;
        println!(
            "t={t:<5} scalar K={:.12} (exact {:.12})  |.| energy K={:.12} (min(|x|,t) = {})",
            k.upper,
            1.5 * (1.0f64).min(a * t),
            kabs.upper,
            (1.5f64).min(t)
        );
    }

    // q-Laplace couples in dimension 64: upper bounds with certificates where available
    for q in [2.0, 3.0] {
        let op = Arc::new(q_laplace(q, 64)?);
        let x = random_smooth_vector(64, 7);
        let couple = AccretiveCouple::new(op);
        let k = k_function(&couple, &x, 0.01)?;
        println!(
            "q={q}: K(x, 0.01) <= {:.8}, certified lower {:?}, method {:?}",
            k.upper, k.lower, k.method
        );
    }
    Ok(())
}
