//! Verdicts, preconditions and determinism of the checks.

use std::sync::Arc;

use nonlin_interp::accretive::{q_laplace, Domination, OpRef, QuadraticEnergy, ScalarLinear, SinReaction};
use nonlin_interp::grid::{GridFunction, LogGrid};
use nonlin_interp::harness::{
    check_hardy, check_holder, check_perturbation, check_pointwise, check_subgradient, is_theorem, run_theorem,
    SuiteOptions, Verdict, THEOREMS,
};
use nonlin_interp::spaces::{quadrature_error, FunctionSpace};
use nonlin_interp::Error;

fn scalar(a: f64, omega: f64) -> OpRef {
    Arc::new(ScalarLinear::shifted(a, omega).unwrap())
}

#[test]
fn registry_ids_are_unique_and_known() {
    let mut ids: Vec<_> = THEOREMS.iter().map(|(id, _)| *id).collect();
    assert!(ids.iter().all(|id| is_theorem(id)));
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), THEOREMS.len());
    assert!(!is_theorem("all"));
    assert!(run_theorem("nope", &SuiteOptions::default()).is_err());
}

#[test]
fn suite_runs_are_deterministic() {
    let opts = SuiteOptions {
        samples: Some(5),
        ..SuiteOptions::default()
    };
    for id in ["mean-k", "perturbation"] {
        let a = run_theorem(id, &opts).unwrap();
        let b = run_theorem(id, &opts).unwrap();
        let ja: Vec<_> = a.iter().map(|r| r.to_json().unwrap()).collect();
        let jb: Vec<_> = b.iter().map(|r| r.to_json().unwrap()).collect();
        assert_eq!(ja, jb, "{id}");
    }
}

#[test]
fn small_suites_pass() {
    for id in ["domain-chain", "subgradient", "hardy", "crandall-liggett"] {
        for r in run_theorem(id, &SuiteOptions::default()).unwrap() {
            assert_eq!(r.verdict, Verdict::Pass, "{id} {}: {:?}", r.instance, r.summary);
        }
    }
}

#[test]
fn failed_domination_withholds_the_verdict() {
    let grid = LogGrid::default();
    let space = FunctionSpace::weighted(0.5, 2.0).unwrap();
    // |c sin v| ≤ a|v| fails for a = 0.01 < c without an affine term
    let dom = Domination::new(0.01, 0.0, 0.0).unwrap();
    let samples = vec![vec![1.0], vec![-0.5]];
    let r = check_perturbation("s", &scalar(1.0, 0.0), Arc::new(SinReaction { c: 0.3 }), dom, &space, 0.5, &samples, &grid)
        .unwrap();
    assert_eq!(r.verdict, Verdict::Withheld);
    assert!(!r.hypothesis_violations.is_empty());
}

#[test]
fn tau_omega_precondition() {
    let grid = LogGrid::default();
    match check_pointwise("s", &scalar(0.0, 2.0), &[1.0], 1.0, &grid) {
        Err(Error::Precondition(m)) => assert!(m.contains("τω < 1")),
        other => panic!("expected precondition error, got {:?}", other.map(|r| r.verdict)),
    }
}

#[test]
fn subgradient_rejects_theta_from_half() {
    let grid = LogGrid::default();
    for theta in [0.5, 0.75] {
        let space = FunctionSpace::weighted(theta, 2.0).unwrap();
        let e = Arc::new(QuadraticEnergy::new(1.0).unwrap());
        assert!(matches!(
            check_subgradient("q", e, &[1.0], &space, 1.0, &grid),
            Err(Error::Precondition(_))
        ));
    }
}

#[test]
fn hardy_image_needs_node_tau() {
    let grid = LogGrid::default();
    let space = FunctionSpace::weighted(0.5, 2.0).unwrap();
    assert!(check_hardy(&space, 4, 0.3, &grid).is_err());
    assert_eq!(check_hardy(&space, 4, 1.0, &grid).unwrap().verdict, Verdict::Pass);
}

#[test]
fn holder_horizon_must_fit_grid() {
    let grid = LogGrid::default();
    let space = FunctionSpace::weighted(0.25, 2.0).unwrap();
    let op: OpRef = Arc::new(q_laplace(2.0, 16).unwrap());
    let x = vec![0.5; 16];
    assert!(check_holder("h", &op, &x, &space, 0.1, 1e3, &grid).is_err());
}

#[test]
fn quadrature_error_is_second_order_for_any_node_count() {
    let space = FunctionSpace::weighted(0.5, 2.0).unwrap();
    // both parities of the node count; the coarse grid must keep the last node
    for n in [256, 257] {
        let grid = LogGrid::new(1e-4, 1.0, n).unwrap();
        let f = GridFunction::from_fn(&grid, |t| 1.0 / (1.0 + t)).unwrap();
        let norm = space.norm_window(&f, 0.0, 1.0).unwrap();
        let q = quadrature_error(&space, &f, 0.0, 1.0).unwrap();
        assert!(q < 1e-4 * norm, "n = {n}: {q} against {norm}");
    }
}
