//! Weighted Lᵖ norms on the log grid, the Hardy operator and the dilation constant.
//!
//! `cargo run --release --example function_spaces`

use nonlin_interp::grid::{GridFunction, LogGrid};
use nonlin_interp::spaces::{dilation_norm, gamma, hardy_apply, hardy_norm_estimate, FunctionSpace};

fn main() -> nonlin_interp::Result<()> {
    let grid = LogGrid::default();
    for (theta, p) in [(0.5, 2.0), (0.25, 2.0), (0.4, 3.0)] {
        let space = FunctionSpace::weighted(theta, p)?;
        let chi = GridFunction::indicator_below(&grid, 1.0);
        // ‖χ_(0,1)‖ = (p(1−θ))^{-1/p}
        let exact = (p * (1.0 - theta)).powf(-1.0 / p);
        println!(
            "{:<18} ||chi(0,1)|| = {:.10} (exact {:.10})  ||P|| >= {:.4} of bound {:.4}  ||D2|| = {:.4}  gamma = {:.4}",
            space.label(),
            space.norm(&chi)?,
            exact,
            hardy_norm_estimate(&space, 24)?,
            space.hardy_bound()?,
            dilation_norm(&space),
            gamma(&space),
        );
    }
    // P(χ_(0,τ)) = min{1, τ/t}
    let tau = 0.01;
    let pf = hardy_apply(&GridFunction::indicator_below(&grid, tau))?;
    let err = grid
        .nodes()
        .iter()
        .zip(pf.values())
        .map(|(t, v)| (v - (1.0f64).min(tau / t)).abs())
        .fold(0.0, f64::max);
    println!("max |P(chi(0,{tau})) - min(1, tau/t)| over nodes = {err:.2e}");
    Ok(())
}
