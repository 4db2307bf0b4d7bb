//! The couple (‖·‖, √E) on the squared space for subgradients of convex energies, and
//! the rejection of θ ≥ 1/2.
//!
//! `cargo run --release --example subgradient`

use std::sync::Arc;

use nonlin_interp::accretive::{QLaplaceEnergy, QuadraticEnergy};
use nonlin_interp::grid::LogGrid;
use nonlin_interp::harness::{check_subgradient, random_smooth_vector};
use nonlin_interp::spaces::{gamma, FunctionSpace};

fn main() -> nonlin_interp::Result<()> {
    let grid = LogGrid::default();
    for theta in [0.1, 0.25, 0.4] {
        let space = FunctionSpace::weighted(theta, 2.0)?;
        let quad = check_subgradient("quadratic", Arc::new(QuadraticEnergy::new(1.0)?), &[1.0], &space, 1.0, &grid)?;
        let dir = check_subgradient(
            "dirichlet q=3",
            Arc::new(QLaplaceEnergy::new(3.0, 32)?),
            &random_smooth_vector(32, 7),
            &space,
            1.0,
            &grid,
        )?;
        println!("theta={theta} gamma={:.4}", gamma(&space));
        println!("  {}", quad.summary_line());
        println!("  {}", dir.summary_line());
    }
    let space = FunctionSpace::weighted(0.6, 2.0)?;
    match check_subgradient("quadratic", Arc::new(QuadraticEnergy::new(1.0)?), &[1.0], &space, 1.0, &grid) {
        Ok(_) => println!("theta=0.6 unexpectedly accepted"),
        Err(e) => println!("theta=0.6 rejected: {e}"),
    }
    Ok(())
}
