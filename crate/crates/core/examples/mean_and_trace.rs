//! Mean-method step construction and the trace-method upper bound against N_E^τ.
//!
//! `cargo run --release --example mean_and_trace`

use std::sync::Arc;

use nonlin_interp::accretive::{q_laplace, ScalarLinear};
use nonlin_interp::grid::LogGrid;
use nonlin_interp::harness::random_smooth_vector;
use nonlin_interp::interpolation::{mean_method_tau, trace_method_upper, AccretiveCouple};
use nonlin_interp::spaces::FunctionSpace;

fn main() -> nonlin_interp::Result<()> {
    let grid = LogGrid::default();
    let space = FunctionSpace::weighted(0.5, 2.0)?;
    let tau = 1.0;
    let lin = Arc::new(ScalarLinear::new(1.0)?);
    for eps in [0.5, 0.1, 0.01] {
        let m = mean_method_tau(&AccretiveCouple::new(lin.clone()), &[1.0], &space, tau, eps, &grid)?;
        println!(
            "eps={eps:<5} N={:.6} <= value={:.6} <= 2(1+eps)(N+eps*w)={:.6}  cells={} certified={}",
            m.n_tau, m.value, m.upper_bound, m.cells, m.certified
        );
    }
    let tr = trace_method_upper(lin.as_ref(), &[1.0], &space, tau, &grid)?;
    println!(
        "trace value {:.6} <= {:.4} x resolvent norm {:.6}; mean cost {:.6} <= ||P|| x trace",
        tr.trace_value, tr.factor, tr.resolvent_norm, tr.mean_cost
    );

    let heat = Arc::new(q_laplace(2.0, 64)?);
    let x = random_smooth_vector(64, 7);
    let m = mean_method_tau(&AccretiveCouple::new(heat.clone()), &x, &space, 0.5, 0.1, &grid)?;
    println!("heat n=64: N={:.6} value={:.6} bound={:.6} certified={}", m.n_tau, m.value, m.upper_bound, m.certified);
    Ok(())
}
