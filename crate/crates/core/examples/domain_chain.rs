//! Interpolation sets of A and of the shifted operators I + hA, with membership
//! indicators on points inside, on the boundary of and outside the domain closure.
//!
//! `cargo run --release --example domain_chain`

use nonlin_interp::harness::{run_theorem, SuiteOptions};

fn main() -> nonlin_interp::Result<()> {
    for r in run_theorem("domain-chain", &SuiteOptions::default())? {
        println!("{}", r.summary_line());
        for n in &r.notes {
            println!("    {n}");
        }
    }
    Ok(())
}
