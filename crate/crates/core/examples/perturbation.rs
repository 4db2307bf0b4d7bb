//! Lipschitz perturbations A + B with B dominated by A: the affine bound between the
//! interpolation functions in both directions and agreement of the interpolation sets.
//!
//! `cargo run --release --example perturbation`

use std::sync::Arc;

use nonlin_interp::accretive::{Domination, OperatorConfig, SinReaction};
use nonlin_interp::grid::LogGrid;
use nonlin_interp::harness::check_perturbation;
use nonlin_interp::spaces::FunctionSpace;

fn main() -> nonlin_interp::Result<()> {
    let grid = LogGrid::default();
    let space = FunctionSpace::weighted(0.5, 2.0)?;
    let op = OperatorConfig::parse("scalar:a=1")?.build()?;
    let samples: Vec<Vec<f64>> = [-3.0, -0.5, 0.1, 1.0, 2.5].iter().map(|v| vec![*v]).collect();
    for c in [0.1f64, 0.3, 0.45] {
        // |c sin v| <= c|v| = c|Av|
        let dom = Domination::new(c, 0.0, 0.0)?;
        let rep = check_perturbation(
            &format!("scalar:a=1 + sin(c={c})"),
            &op,
            Arc::new(SinReaction { c }),
            dom,
            &space,
            1.0,
            &samples,
            &grid,
        )?;
        println!("{}", rep.summary_line());
        println!(
            "    a_tilde = {:.4}, reverse a_tilde = {:.4}, worst ratio {:.4}",
            rep.constants["a_tilde"], rep.constants["a_tilde_reverse"], rep.summary[0].worst_ratio
        );
    }
    Ok(())
}
