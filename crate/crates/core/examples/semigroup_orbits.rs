//! Exponential formula against closed forms, orbits on log grids and the
//! integral-solution inequality.
//!
//! `cargo run --release --example semigroup_orbits`

use nonlin_interp::accretive::{q_laplace, AccretiveOperator, ScalarLinear};
use nonlin_interp::harness::{check_exponential_formula, random_smooth_vector};
use nonlin_interp::semigroup::{evolve, graph_samples, integral_solution_check, orbit};

fn main() -> nonlin_interp::Result<()> {
    let lin = ScalarLinear::new(1.0)?;
    for k in [4, 8, 12, 16] {
        let n = 1usize << k;
        let traj = nonlin_interp::semigroup::evolve_with(&lin, &[1.0], 1.0, n, false)?;
        println!("n = 2^{k:<2}  |J_(1/n)^n 1 - e^-1| = {:.3e}", (traj.final_state()[0] - (-1.0f64).exp()).abs());
    }

    let heat = q_laplace(2.0, 64)?;
    let x = random_smooth_vector(64, 7);
    let rep = check_exponential_formula("heat", &heat, &x, 1.0, 1 << 16, 1e-4)?;
    println!("{}  max discrete L2 error {:.3e}", rep.summary_line(), rep.constants["max_error"]);

    let p4 = q_laplace(4.0, 32)?;
    let x = random_smooth_vector(32, 9);
    let traj = evolve(&p4, &x, 0.5, 256)?;
    let s = traj.summary(&p4);
    println!("q=4 flow: refinement increments {:?}, Lipschitz {:.4} <= {:.4}", s.cauchy_increments, s.lipschitz_estimate, s.lipschitz_bound);
    let samples = graph_samples(&p4, &[x.clone(), random_smooth_vector(32, 10)], &[0.01, 0.1])?;
    let integral = integral_solution_check(&p4, &traj, &samples)?;
    println!("integral-solution inequality: worst violation {:.2e} (slack {:.2e}) pass={}", integral.worst_violation, integral.slack, integral.pass);

    let times: Vec<f64> = (1..=8).map(|k| 0.01 * k as f64).collect();
    let o = orbit(&p4, &x, &times, 8)?;
    for (t, (s, e)) in o.times.iter().zip(o.states.iter().zip(&o.errors)) {
        println!("  t={t:.2} ||S(t)x|| = {:.6}  m vs 2m error {:.1e}", p4.space().norm(s), e);
    }
    Ok(())
}
