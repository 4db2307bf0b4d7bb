//! Explicit constants of the estimates.

use std::sync::Arc;

use approx::assert_relative_eq;
use nonlin_interp::accretive::{Domination, OpRef, ScalarLinear};
use nonlin_interp::grid::LogGrid;
use nonlin_interp::harness::{check_norm_equivalence, dirichlet_laplacian_matrix, exponent_map, linear_sup};
use nonlin_interp::spaces::{dilation_norm, gamma, square_space, FunctionSpace};

#[test]
fn hardy_bound_is_inverse_theta() {
    for theta in [0.1, 0.25, 0.5, 0.9] {
        let s = FunctionSpace::weighted(theta, 2.0).unwrap();
        assert_relative_eq!(s.hardy_bound().unwrap(), 1.0 / theta, max_relative = 1e-15);
    }
}

#[test]
fn dilation_norm_and_gamma() {
    for theta in [0.1, 0.25, 0.4, 0.49] {
        let s = FunctionSpace::weighted(theta, 3.0).unwrap();
        assert_relative_eq!(dilation_norm(&s), 1.0 / 2f64.powf(1.0 - theta), max_relative = 1e-15);
        let g = gamma(&s);
        assert_relative_eq!(g, 2f64.powf(theta - 0.5), max_relative = 1e-15);
        assert!(g < 1.0);
    }
    assert_relative_eq!(gamma(&FunctionSpace::weighted(0.5, 2.0).unwrap()), 1.0, max_relative = 1e-15);
}

#[test]
fn square_space_needs_theta_below_half() {
    let s = square_space(&FunctionSpace::weighted(0.25, 2.0).unwrap()).unwrap();
    assert_eq!(s.theta_p(), Some((0.5, 2.0)));
    assert!(square_space(&FunctionSpace::weighted(0.5, 2.0).unwrap()).is_err());
}

#[test]
fn exponent_map_values() {
    let (alpha, r) = exponent_map(4.0, 0.25, 2.0);
    assert_relative_eq!(alpha, 2.0 / 3.0, max_relative = 1e-15);
    assert_relative_eq!(r, 3.0, max_relative = 1e-15);
    // q = 2 is the identity up to α = 2θ
    for theta in [0.1, 0.25, 0.4] {
        let (alpha, r) = exponent_map(2.0, theta, 3.0);
        assert_relative_eq!(alpha, 2.0 * theta, max_relative = 1e-15);
        assert_relative_eq!(r, 3.0, max_relative = 1e-15);
    }
}

#[test]
fn resolvent_factor_at_half() {
    let op: OpRef = Arc::new(ScalarLinear::shifted(0.0, 1.0).unwrap());
    let space = FunctionSpace::weighted(0.5, 2.0).unwrap();
    let r = check_norm_equivalence("s", &op, &[1.0], &space, 0.5, &LogGrid::default()).unwrap();
    let row = r.rows_of("resolvent-upper").next().unwrap();
    assert_eq!(row.constant, 3.0);
}

#[test]
fn reverse_domination() {
    let d = Domination::new(0.5, 0.2, 0.3).unwrap().reversed().unwrap();
    assert_relative_eq!(d.a, 1.0, max_relative = 1e-15);
    assert_relative_eq!(d.b0, 0.4, max_relative = 1e-15);
    assert_relative_eq!(d.b1, 0.6, max_relative = 1e-15);
    assert!(Domination::new(1.0, 0.0, 0.0).unwrap().reversed().is_err());
}

#[test]
fn linear_regularizing_supremum_is_inverse_e() {
    let grid = LogGrid::default();
    let m = dirichlet_laplacian_matrix(16);
    let (sup, _) = linear_sup(&m, 1.0, &grid);
    assert!((sup - (-1.0f64).exp()).abs() < 1e-3);
    assert!(sup <= (-1.0f64).exp() * (1.0 + 1e-12));
}
