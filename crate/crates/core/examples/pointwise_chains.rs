//! Nodewise resolvent, variation and semigroup chains for `A = id` and a q-Laplacian.

use std::sync::Arc;

use nonlin_interp::accretive::{q_laplace, OpRef, ScalarLinear};
use nonlin_interp::grid::LogGrid;
use nonlin_interp::harness::{check_pointwise, random_smooth_vector};

fn main() -> nonlin_interp::Result<()> {
    let grid = LogGrid::new(1e-6, 1e2, 2049)?;
    let id: OpRef = Arc::new(ScalarLinear::new(1.0)?);
    let q3: OpRef = Arc::new(q_laplace(3.0, 64)?);
    for (label, op, x) in [
        ("identity, x = 1", id, vec![1.0]),
        ("q-Laplace q=3 n=64", q3, random_smooth_vector(64, 7)),
    ] {
        let start = std::time::Instant::now();
        let rep = check_pointwise(label, &op, &x, 1.0, &grid)?;
        println!("{}  ({:.1?})", rep.summary_line(), start.elapsed());
        for s in &rep.summary {
            println!(
                "    {:<22} rows={:<5} violations={:<3} worst ratio={:.4} certified={}",
                s.chain, s.rows, s.violations, s.worst_ratio, s.certified
            );
        }
        for n in &rep.notes {
            println!("    note: {n}");
        }
    }
    Ok(())
}
