//! Resolvents, Yosida approximations, set norms and residuals of the shipped operators.
//!
//! `cargo run --release --example resolvents`

use nonlin_interp::accretive::{
    domain_indicator, resolve, resolvent_lipschitz_ratio, resolvent_residual, set_norm, yosida, OperatorConfig,
};
use nonlin_interp::harness::random_smooth_vector;

fn main() -> nonlin_interp::Result<()> {
    for text in [
        "scalar:a=2",
        "scalar:a=0,omega=1",
        "energy:energy=abs,k=1",
        "energy:energy=indicator,k=1",
        "matrix:path=crates/core/examples/data/rotation.csv",
        "qlaplace:q=2,n=32",
        "qlaplace:q=4,n=32",
    ] {
        let cfg = match OperatorConfig::parse(text) {
            Ok(c) => c,
            Err(e) => {
                println!("{text}: {e}");
                continue;
            }
        };
        let op = match cfg.build() {
            Ok(op) => op,
            Err(e) => {
                println!("{text}: {e} (run from the workspace root)");
                continue;
            }
        };
        let dim = op.space().dim;
        let x = if dim == 1 { vec![0.8] } else { random_smooth_vector(dim, 3) };
        let y = if dim == 1 { vec![-0.4] } else { random_smooth_vector(dim, 4) };
        let lambda = 0.25;
        let j = resolve(op.as_ref(), lambda, &x)?;
        let a_l = yosida(op.as_ref(), lambda, &x)?;
        println!(
            "{:<34} omega={} |J x - x|={:.6} |A_l x|={:.6} |Ax|={:.6} residual={:.1e} lipschitz ratio={:.6} {:?}",
            op.name(),
            op.omega(),
            op.space().dist(&j, &x),
            op.space().norm(&a_l),
            set_norm(op.as_ref(), &x),
            resolvent_residual(op.as_ref(), lambda, &x, &j),
            resolvent_lipschitz_ratio(op.as_ref(), lambda, &x, &y)?,
            domain_indicator(op.as_ref(), &x),
        );
    }
    Ok(())
}
