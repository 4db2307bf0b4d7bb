//! Hölder regularity of orbits: the displacement bound ‖S(t+h)x − S(t)x‖ against the
//! interpolation function, and the fitted exponent of h ↦ ‖S(h)x − x‖.
//!
//! `cargo run --release --example holder`

use nonlin_interp::harness::{run_theorem, SuiteOptions};

fn main() -> nonlin_interp::Result<()> {
    for r in run_theorem("holder", &SuiteOptions::default())? {
        println!(
            "{}  fitted exponent {:.4}",
            r.summary_line(),
            r.constants.get("fitted_exponent").copied().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
