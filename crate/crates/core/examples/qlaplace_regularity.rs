//! Speed of the q-Laplace flow in weighted Lᵖ against the interpolation function of the
//! initial value, with the exponent map (α, r).
//!
//! `cargo run --release --example qlaplace_regularity`

use nonlin_interp::grid::LogGrid;
use nonlin_interp::harness::{exponent_map, qlaplace_regularity_sweep, InitialData};

fn main() -> nonlin_interp::Result<()> {
    let grid = LogGrid::default();
    let thetas = [0.25, 0.4];
    for q in [2.0, 3.0, 4.0] {
        for theta in thetas {
            let (alpha, r) = exponent_map(q, theta, 2.0);
            println!("q={q} theta={theta}: alpha={alpha:.4} r={r:.4}");
        }
        for fam in [InitialData::Smooth, InitialData::Hat, InitialData::Rough, InitialData::Zero] {
            for rep in qlaplace_regularity_sweep(fam.label(), q, &thetas, 2.0, &fam.sample(64), 1.0, &grid)? {
                println!(
                    "  {}  speed={:.4} resolvent={:.4}",
                    rep.summary_line(),
                    rep.constants["speed_norm"],
                    rep.constants["resolvent_norm"]
                );
            }
        }
    }
    Ok(())
}
