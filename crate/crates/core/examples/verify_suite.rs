//! Runs every check id on its default instances and prints one line per report.
//!
//! `cargo run --release --example verify_suite [id ...]`

use std::time::Instant;

use nonlin_interp::harness::{run_theorem, SuiteOptions, THEOREMS};

fn main() -> nonlin_interp::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let opts = SuiteOptions::default();
    let mut all_pass = true;
    for (id, _) in THEOREMS {
        if !args.is_empty() && !args.iter().any(|a| a == id) {
            continue;
        }
        let start = Instant::now();
        let reports = run_theorem(id, &opts)?;
        for r in &reports {
            println!("{}", r.summary_line());
            all_pass &= r.passed();
        }
        println!("  {id}: {:.1}s", start.elapsed().as_secs_f64());
    }
    println!("{}", if all_pass { "all checks pass" } else { "some checks fail" });
    Ok(())
}
