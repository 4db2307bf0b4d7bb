//! Regularizing semigroups: |AS(t)x| against K(x,t)/t, and sup_t ‖tAe^{-tA}‖ = e^{-1}
//! for a symmetric positive matrix.
//!
//! `cargo run --release --example regularizing`

use nonlin_interp::accretive::MatrixOperator;
use nonlin_interp::grid::LogGrid;
use nonlin_interp::harness::{check_linear_regularizing, dirichlet_laplacian_matrix, run_theorem, SuiteOptions};
use nonlin_interp::normed::NormedSpace;

fn main() -> nonlin_interp::Result<()> {
    for r in run_theorem("regularizing", &SuiteOptions::default())? {
        println!("{}", r.summary_line());
    }
    let grid = LogGrid::default();
    for n in [4, 16, 32] {
        let m = MatrixOperator::new(dirichlet_laplacian_matrix(n), 0.0, NormedSpace::euclidean(n))?;
        let rep = check_linear_regularizing(&format!("dirichlet n={n}"), &m, 1.0, &grid)?;
        println!(
            "n={n:<3} sup ||tAe^-tA|| = {:.8} (e^-1 = {:.8})",
            rep.constants["measured_sup"],
            (-1.0f64).exp()
        );
    }
    Ok(())
}
