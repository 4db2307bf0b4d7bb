//! Closed-form oracles for norms, K-functionals, resolvents and flows.

use std::sync::Arc;

use approx::assert_relative_eq;
use nonlin_interp::accretive::{
    q_laplace, resolve, set_norm, AbsEnergy, AccretiveOperator, Energy, IntervalIndicator, MatrixOperator,
    QLaplaceEnergy, QuadraticEnergy, ScalarLinear, SubgradientOperator,
};
use nonlin_interp::grid::{GridFunction, LogGrid};
use nonlin_interp::harness::{dirichlet_laplacian_matrix, random_smooth_vector, t_a_exp_norm};
use nonlin_interp::interpolation::{k_function, k_profile, AccretiveCouple, KMethod, RearrangementCouple};
use nonlin_interp::normed::NormedSpace;
use nonlin_interp::semigroup::{evolve_with, orbit, Scheme};
use nonlin_interp::spaces::{hardy_apply, FunctionSpace};

#[test]
fn indicator_norm_matches_power_integral() {
    let grid = LogGrid::default();
    for (theta, p) in [(0.5, 2.0), (0.25, 2.0), (0.4, 3.0), (0.7, 1.5)] {
        let space = FunctionSpace::weighted(theta, p).unwrap();
        for tau in [1e-3, 1.0, 10.0] {
            let f = GridFunction::indicator_below(&grid, tau);
            // ∫₀^τ t^{p(1−θ)−1} dt = τ^{p(1−θ)}/(p(1−θ))
            let exact = (tau.powf(p * (1.0 - theta)) / (p * (1.0 - theta))).powf(1.0 / p);
            assert_relative_eq!(space.norm(&f).unwrap(), exact, max_relative = 1e-10);
        }
    }
}

#[test]
fn hardy_image_of_indicator() {
    let grid = LogGrid::default();
    for tau in [1e-4, 0.1, 1.0, 10.0] {
        let pf = hardy_apply(&GridFunction::indicator_below(&grid, tau)).unwrap();
        for (t, v) in grid.nodes().iter().zip(pf.values()) {
            assert!((v - (1.0f64).min(tau / t)).abs() <= 1e-9, "t={t} tau={tau}");
        }
    }
}

#[test]
fn rearrangement_k_matches_formula_and_truncation() {
    let f = [0.3, -2.0, 1.1, 0.0, 0.7, -0.2];
    let c = RearrangementCouple::new(f.len()).unwrap();
    for t in [0.05, 1.0 / 6.0, 0.4, 0.75, 1.0, 3.0] {
        let k = k_function(&c, &f, t).unwrap();
        let formula = c.rearrangement_integral(&f, t);
        let (brute, _) = c.truncation_brute_force(&f, t);
        assert_relative_eq!(k.upper, formula, max_relative = 1e-12);
        assert_relative_eq!(brute, formula, max_relative = 1e-12);
    }
}

#[test]
fn scalar_linear_k_is_closed_form() {
    for a in [0.1, 1.0, 5.0] {
        let couple = AccretiveCouple::new(Arc::new(ScalarLinear::new(a).unwrap()));
        for t in [1e-3, 0.2, 1.0, 7.0] {
            let k = k_function(&couple, &[-1.5], t).unwrap();
            let exact = 1.5 * (1.0f64).min(a * t);
            assert_relative_eq!(k.upper, exact, max_relative = 1e-14);
            assert_relative_eq!(k.lower.unwrap(), exact, max_relative = 1e-14);
        }
    }
}

#[test]
fn abs_and_indicator_k_are_closed_form() {
    let abs = AccretiveCouple::new(Arc::new(SubgradientOperator::new(Arc::new(AbsEnergy::new(2.0)))));
    let ind = AccretiveCouple::new(Arc::new(SubgradientOperator::new(Arc::new(IntervalIndicator::new(1.0)))));
    for t in [0.01, 0.3, 1.0, 4.0] {
        let k = k_function(&abs, &[1.2], t).unwrap();
        assert_relative_eq!(k.upper, (1.2f64).min(2.0 * t), max_relative = 1e-14);
        assert_eq!(k.method, KMethod::ClosedForm);
        // outside [−1,1] the cost is the distance to the interval (|Av| = 0 inside)
        let k = k_function(&ind, &[1.7], t).unwrap();
        assert_relative_eq!(k.upper, 0.7, max_relative = 1e-14);
        let k = k_function(&ind, &[0.4], t).unwrap();
        assert_eq!(k.upper, 0.0);
    }
}

#[test]
fn scalar_resolvent_and_semigroup() {
    let op = ScalarLinear::shifted(0.5, 1.0).unwrap();
    // A x = (a − ω) x = −0.5 x
    for lambda in [0.1, 0.5, 0.9] {
        let j = resolve(&op, lambda, &[2.0]).unwrap();
        assert_relative_eq!(j[0], 2.0 / (1.0 - 0.5 * lambda), max_relative = 1e-14);
    }
    let s = op.exact_semigroup(1.0, &[2.0]).unwrap();
    assert_relative_eq!(s[0], 2.0 * (0.5f64).exp(), max_relative = 1e-14);
    assert_relative_eq!(set_norm(&op, &[2.0]), 1.0, max_relative = 1e-14);
}

#[test]
fn quadratic_energy_resolvent() {
    let op = SubgradientOperator::new(Arc::new(QuadraticEnergy::new(3.0).unwrap()));
    for t in [0.01, 1.0, 10.0] {
        let j = resolve(&op, t, &[1.0]).unwrap();
        assert_relative_eq!(j[0], 1.0 / (1.0 + 3.0 * t), max_relative = 1e-12);
    }
}

#[test]
fn abs_energy_flow_is_soft_threshold() {
    let e = AbsEnergy::new(1.0);
    assert_eq!(e.exact_flow(0.5, &[2.0]).unwrap(), vec![1.5]);
    assert_eq!(e.exact_flow(3.0, &[2.0]).unwrap(), vec![0.0]);
    assert_eq!(e.exact_flow(0.5, &[-2.0]).unwrap(), vec![-1.5]);
}

#[test]
fn heat_resolvent_matches_dense_solve() {
    let n = 24;
    let op = q_laplace(2.0, n).unwrap();
    let x = random_smooth_vector(n, 3);
    let lambda = 0.05;
    let j = resolve(&op, lambda, &x).unwrap();
    let m = nalgebra::DMatrix::identity(n, n) + dirichlet_laplacian_matrix(n) * lambda;
    let exact = m.lu().solve(&nalgebra::DVector::from_column_slice(&x)).unwrap();
    for (a, b) in j.iter().zip(exact.iter()) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn heat_flow_euler_matches_eigen_oracle() {
    let n = 64;
    let op = q_laplace(2.0, n).unwrap();
    let x = random_smooth_vector(n, 7);
    let exact = op.exact_semigroup(0.5, &x).unwrap();
    let traj = evolve_with(&op, &x, 0.5, 1 << 14, false).unwrap();
    assert!(op.space().dist(traj.final_state(), &exact) < 1e-4);
}

#[test]
fn scalar_exponential_formula_converges_at_first_order() {
    let op = ScalarLinear::new(1.0).unwrap();
    let mut prev = f64::INFINITY;
    for k in [6, 8, 10, 12] {
        let n = 1usize << k;
        let traj = evolve_with(&op, &[1.0], 1.0, n, false).unwrap();
        let err = (traj.final_state()[0] - (-1.0f64).exp()).abs();
        // (1 + 1/n)^{−n} − e^{−1} ≈ e^{−1}/(2n)
        assert_relative_eq!(err, (-1.0f64).exp() / (2.0 * n as f64), max_relative = 0.05);
        assert!(err < prev);
        prev = err;
    }
}

#[test]
fn orbit_uses_closed_form_when_available() {
    let op = ScalarLinear::new(2.0).unwrap();
    let o = orbit(&op, &[1.0], &[0.1, 0.5, 1.0], 4).unwrap();
    assert_eq!(o.scheme, Scheme::Exact);
    assert_relative_eq!(o.states[2][0], (-2.0f64).exp(), max_relative = 1e-14);
}

#[test]
fn t_a_exp_norm_on_diagonal() {
    let m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 4.0]));
    // max over eigenvalues of tλe^{−tλ}
    for t in [0.1, 0.25, 1.0] {
        let exact = [1.0f64, 4.0].iter().map(|l| t * l * (-t * l).exp()).fold(0.0, f64::max);
        assert_relative_eq!(t_a_exp_norm(&m, t), exact, max_relative = 1e-10);
    }
}

#[test]
fn k_profile_of_heat_is_certified_and_monotone() {
    let op = Arc::new(q_laplace(2.0, 32).unwrap());
    let x = random_smooth_vector(32, 1);
    let prof = k_profile(&AccretiveCouple::new(op), &x, &LogGrid::new(1e-4, 10.0, 401).unwrap()).unwrap();
    let gap = prof.max_rel_gap().expect("certified");
    assert!((0.0..1e-6).contains(&gap), "gap {gap}");
    assert!(prof.monotonicity_defect() < 1e-9);
}

#[test]
fn matrix_operator_resolvent_solves_linear_system() {
    let m = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]);
    let op = MatrixOperator::new(m.clone(), 0.0, NormedSpace::euclidean(2)).unwrap();
    let j = resolve(&op, 0.5, &[1.0, 1.0]).unwrap();
    let back = nalgebra::DVector::from_column_slice(&j) + m * nalgebra::DVector::from_column_slice(&j) * 0.5;
    assert!((back[0] - 1.0).abs() < 1e-12 && (back[1] - 1.0).abs() < 1e-12);
}

#[test]
fn dirichlet_energy_value_for_q2() {
    let e = QLaplaceEnergy::new(2.0, 3).unwrap();
    // h = 1/4, slopes of (1, 1, 1) with zero boundary: 4, 0, 0, −4
    let v = e.value(&[1.0, 1.0, 1.0]);
    assert_relative_eq!(v, 0.25 * (16.0 + 16.0) / 2.0, max_relative = 1e-14);
}
