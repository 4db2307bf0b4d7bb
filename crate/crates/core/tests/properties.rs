//! Randomized invariants.

use std::sync::Arc;

use nonlin_interp::accretive::{
    q_laplace, resolve, AbsEnergy, AccretiveOperator, OperatorConfig, ScalarLinear, SubgradientOperator,
};
use nonlin_interp::cli::slug;
use nonlin_interp::grid::{GridFunction, LogGrid};
use nonlin_interp::harness::{TheoremReport, Verdict};
use nonlin_interp::interpolation::{k_function, k_profile, AccretiveCouple, RearrangementCouple};
use nonlin_interp::spaces::{hardy_apply, FunctionSpace};
use proptest::prelude::*;

fn small_grid() -> LogGrid {
    LogGrid::new(1e-3, 10.0, 65).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_k_closed_form(a in 0.05f64..10.0, x in -5.0f64..5.0, t in 1e-4f64..50.0) {
        let c = AccretiveCouple::new(Arc::new(ScalarLinear::new(a).unwrap()));
        let k = k_function(&c, &[x], t).unwrap();
        let exact = x.abs() * (1.0f64).min(a * t);
        prop_assert!((k.upper - exact).abs() <= 1e-13 * (1.0 + exact));
    }

    #[test]
    fn abs_energy_k_closed_form(k in 0.05f64..10.0, x in -5.0f64..5.0, t in 1e-4f64..50.0) {
        let op = SubgradientOperator::new(Arc::new(AbsEnergy::new(k)));
        let c = AccretiveCouple::new(Arc::new(op));
        let v = k_function(&c, &[x], t).unwrap();
        let exact = x.abs().min(t * k);
        prop_assert!((v.upper - exact).abs() <= 1e-13 * (1.0 + exact));
    }

    #[test]
    fn k_is_monotone_and_k_over_t_nonincreasing(
        a in 0.1f64..5.0,
        x in -2.0f64..2.0,
    ) {
        let op = Arc::new(ScalarLinear::new(a).unwrap());
        let prof = k_profile(&AccretiveCouple::new(op), &[x], &small_grid()).unwrap();
        let kt = prof.k_over_t();
        for w in prof.k.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-14));
        }
        for w in kt.values().windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-14));
        }
        prop_assert!(prof.monotonicity_defect() <= 1e-12);
    }

    #[test]
    fn rearrangement_k_equals_brute_force(
        f in prop::collection::vec(-3.0f64..3.0, 1..7),
        t in 0.01f64..2.0,
    ) {
        let c = RearrangementCouple::new(f.len()).unwrap();
        let (brute, _) = c.truncation_brute_force(&f, t);
        let formula = c.rearrangement_integral(&f, t);
        prop_assert!((brute - formula).abs() <= 1e-12 * (1.0 + formula));
    }

    #[test]
    fn resolvent_is_nonexpansive(
        x in prop::collection::vec(-1.0f64..1.0, 16),
        y in prop::collection::vec(-1.0f64..1.0, 16),
        lambda in 1e-3f64..1.0,
    ) {
        let op = q_laplace(3.0, 16).unwrap();
        let sp = op.space();
        let jx = resolve(&op, lambda, &x).unwrap();
        let jy = resolve(&op, lambda, &y).unwrap();
        prop_assert!(sp.dist(&jx, &jy) <= sp.dist(&x, &y) * (1.0 + 1e-8) + 1e-12);
    }

    #[test]
    fn norm_is_homogeneous(c in 0.01f64..100.0, theta in 0.05f64..0.95, p in 1.0f64..4.0) {
        let grid = small_grid();
        let space = FunctionSpace::weighted(theta, p).unwrap();
        let f = GridFunction::from_fn(&grid, |t| (-t).exp()).unwrap();
        let g = GridFunction::from_fn(&grid, |t| c * (-t).exp()).unwrap();
        let (nf, ng) = (space.norm(&f).unwrap(), space.norm(&g).unwrap());
        prop_assert!((ng - c * nf).abs() <= 1e-12 * ng);
    }

    #[test]
    fn hardy_image_at_nodes(i in 0usize..65) {
        let grid = small_grid();
        let tau = grid.nodes()[i];
        let pf = hardy_apply(&GridFunction::indicator_below(&grid, tau)).unwrap();
        for (t, v) in grid.nodes().iter().zip(pf.values()) {
            prop_assert!((v - (1.0f64).min(tau / t)).abs() <= 1e-9);
        }
    }

    #[test]
    fn verdict_follows_rows(
        rows in prop::collection::vec((0.0f64..2.0, 0.0f64..2.0), 1..20),
        violation in any::<bool>(),
    ) {
        let mut rep = TheoremReport::new("t", "i");
        for (k, (l, r)) in rows.iter().enumerate() {
            rep.push("c", k as f64, *l, *r, 1.0, 0.0, true);
        }
        if violation {
            rep.hypothesis_violation("hypothesis fails");
        }
        let rep = rep.finish();
        let expected = if violation {
            Verdict::Withheld
        } else if rows.iter().all(|(l, r)| l <= r) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        prop_assert_eq!(rep.verdict, expected);
        prop_assert_eq!(rep.violations(), rows.iter().filter(|(l, r)| l > r).count());
    }

    #[test]
    fn operator_label_round_trips(a in 0.01f64..10.0, omega in 0.0f64..2.0, q in 1.5f64..5.0, n in 2usize..200) {
        for cfg in [
            OperatorConfig::Scalar { a, omega },
            OperatorConfig::Qlaplace { q, n },
            OperatorConfig::Energy { energy: "abs".into(), k: a },
        ] {
            prop_assert_eq!(OperatorConfig::parse(&cfg.label()).unwrap(), cfg);
        }
    }

    #[test]
    fn slug_is_file_safe(s in ".{0,40}") {
        let out = slug(&s);
        prop_assert!(out.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '-'));
        prop_assert!(!out.starts_with('-') && !out.ends_with('-') && !out.contains("--"));
    }
}
