//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//! Runs as a plain binary (`harness = false`) so the lines are always printed.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nonlin_interp::accretive::{q_laplace, QuadraticEnergy, OpRef, ScalarLinear};
use nonlin_interp::grid::LogGrid;
use nonlin_interp::harness::{
    check_norm_equivalence, check_pointwise, check_subgradient, exponent_map, run_theorem, SuiteOptions,
    TheoremReport, Verdict,
};
use nonlin_interp::spaces::FunctionSpace;
use nonlin_interp::Error;

/// Relative excess allowed on closed-form rows at the norm level and at nodes.
const CLOSED_FORM_REL_SLACK: f64 = 1e-6;
const MACHINE_REL: f64 = 1e-12;
/// Exponential formula error at 2^16 steps.
const EXP_FORMULA_TOL: f64 = 1e-4;
/// Hardy estimate on E(0.5, 2) must exceed this.
const HARDY_MIN_ESTIMATE: f64 = 1.9;
const HARDY_BOUND: f64 = 2.0;
const HARDY_IMAGE_TOL: f64 = 1e-9;
/// Fitted Hoelder exponent must be at least θ minus this.
const HOLDER_EXPONENT_MARGIN: f64 = 0.05;
/// Distance of the linear regularizing supremum from 1/e.
const LINEAR_SUP_TOL: f64 = 1e-3;
const MEAN_K_INSTANCES: usize = 20;
const MEAN_K_EPSILONS: [f64; 3] = [0.5, 0.1, 0.01];

struct Outcome {
    ok: bool,
    detail: String,
}

fn run(id: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Result<String, String>) -> bool {
    let start = Instant::now();
    let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f));
    let elapsed = start.elapsed();
    let mut out = match res {
        Ok(Ok(detail)) => Outcome { ok: true, detail },
        Ok(Err(detail)) => Outcome { ok: false, detail },
        Err(_) => Outcome {
            ok: false,
            detail: "panicked".into(),
        },
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            out.ok = false;
            out.detail = format!("{} (over the {}s limit)", out.detail, limit.as_secs());
        }
    }
    println!(
        "[{}] {id:>2} {name}: {} ({:.1}s)",
        if out.ok { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64()
    );
    out.ok
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(id: &str, opts: &SuiteOptions) -> Result<Vec<TheoremReport>, String> {
    run_theorem(id, opts).map_err(|e| format!("{id}: {e}"))
}

fn all_pass(reps: &[TheoremReport]) -> Result<(), String> {
    for r in reps {
        ensure(r.verdict == Verdict::Pass, || {
            format!("{} on {}: {:?}, {} violations", r.theorem, r.instance, r.verdict, r.violations())
        })?;
    }
    Ok(())
}

fn chain_holds(r: &TheoremReport, chain: &str) -> Result<usize, String> {
    let rows: Vec<_> = r.rows_of(chain).collect();
    ensure(!rows.is_empty(), || format!("{}: no rows in chain {chain}", r.instance))?;
    let bad = rows.iter().filter(|row| !row.holds()).count();
    ensure(bad == 0, || format!("{}: {bad} violations in {chain}", r.instance))?;
    Ok(rows.len())
}

/// Every row of `r` holds as `lhs ≤ rhs + rel·(|lhs| + |rhs|)`, whatever slack the
/// error estimates would grant.
fn tight(r: &TheoremReport, rel: f64) -> Result<(), String> {
    for row in &r.rows {
        let scale = row.lhs.abs() + row.rhs.abs();
        ensure(row.residual <= rel * scale, || {
            format!(
                "{}: {} excess {:.3e} at t={} exceeds {rel:e} relative",
                r.instance, row.chain, row.residual, row.node_t
            )
        })?;
    }
    Ok(())
}

fn scalar(a: f64, omega: f64) -> OpRef {
    Arc::new(ScalarLinear::shifted(a, omega).unwrap())
}

fn pointwise_suite() -> Result<String, String> {
    let grid = LogGrid::default();
    let closed = check_pointwise("scalar:a=1", &scalar(1.0, 0.0), &[1.0], 1.0, &grid).map_err(|e| e.to_string())?;
    ensure(closed.violations() == 0, || format!("closed form: {} violations", closed.violations()))?;
    tight(&closed, MACHINE_REL)?;
    let mut rows = closed.rows.len();
    for q in [2.0, 3.0] {
        let op: OpRef = Arc::new(q_laplace(q, 64).unwrap());
        let x = nonlin_interp::harness::random_smooth_vector(64, 7);
        let r = check_pointwise(&format!("qlaplace q={q}"), &op, &x, 1.0, &grid).map_err(|e| e.to_string())?;
        all_pass(std::slice::from_ref(&r))?;
        rows += r.rows.len();
    }
    Ok(format!("{rows} rows, 0 violations"))
}

fn norm_equivalence_suite() -> Result<String, String> {
    let grid = LogGrid::default();
    let space = FunctionSpace::weighted(0.5, 2.0).unwrap();
    // τω = 0.5 gives (2−τω)/(1−τω) = 3
    let r = check_norm_equivalence("scalar:a=0,omega=1", &scalar(0.0, 1.0), &[1.0], &space, 0.5, &grid)
        .map_err(|e| e.to_string())?;
    let c = r.rows_of("resolvent-upper").next().map(|row| row.constant).unwrap_or(f64::NAN);
    ensure((c - 3.0).abs() <= 1e-15, || format!("resolvent constant {c}, expected 3"))?;
    tight(&r, CLOSED_FORM_REL_SLACK)?;
    let r1 = check_norm_equivalence("scalar:a=1", &scalar(1.0, 0.0), &[1.0], &space, 0.5, &grid)
        .map_err(|e| e.to_string())?;
    tight(&r1, CLOSED_FORM_REL_SLACK)?;
    let reps = suite("norm-equivalence", &SuiteOptions::default())?;
    all_pass(&reps)?;
    Ok(format!("factor at τω=0.5 is {c}; {} instances pass", reps.len()))
}

fn hardy_suite() -> Result<String, String> {
    let reps = suite("hardy", &SuiteOptions::default())?;
    all_pass(&reps)?;
    let r = reps
        .iter()
        .find(|r| r.instance.contains("theta=0.5"))
        .ok_or("no E(0.5,2) instance")?;
    let est = r.constants["estimate"];
    ensure(est > HARDY_MIN_ESTIMATE && est <= HARDY_BOUND, || format!("estimate {est}"))?;
    let worst = r.rows_of("image").map(|row| row.lhs).fold(0.0, f64::max);
    ensure(worst <= HARDY_IMAGE_TOL, || format!("image error {worst:e}"))?;
    Ok(format!("estimate {est:.4} in ({HARDY_MIN_ESTIMATE}, {HARDY_BOUND}], image error {worst:.1e}"))
}

fn mean_k_suite() -> Result<String, String> {
    let opts = SuiteOptions {
        samples: Some(MEAN_K_INSTANCES),
        epsilon: Some(MEAN_K_EPSILONS.to_vec()),
        ..SuiteOptions::default()
    };
    let reps = suite("mean-k", &opts)?;
    ensure(reps.len() == MEAN_K_EPSILONS.len(), || format!("{} reports", reps.len()))?;
    let mut rows = 0;
    for r in &reps {
        rows += chain_holds(r, "lower")?;
        rows += chain_holds(r, "upper")?;
        ensure(r.rows_of("lower").count() == MEAN_K_INSTANCES, || "instance count".into())?;
    }
    Ok(format!("{rows} rows over {} epsilons, 0 violations", reps.len()))
}

fn exp_formula_suite() -> Result<String, String> {
    let opts = SuiteOptions {
        steps: Some(1 << 16),
        ..SuiteOptions::default()
    };
    let reps = suite("crandall-liggett", &opts)?;
    all_pass(&reps)?;
    let mut parts = Vec::new();
    for r in &reps {
        let e = r.constants["max_error"];
        ensure(e <= EXP_FORMULA_TOL && r.constants["tolerance"] <= EXP_FORMULA_TOL, || {
            format!("{}: error {e:e}", r.instance)
        })?;
        parts.push(format!("{} {e:.1e}", r.instance));
    }
    ensure(reps.iter().any(|r| r.instance.contains("qlaplace")), || "no q=2 instance".into())?;
    Ok(parts.join(", "))
}

fn holder_suite() -> Result<String, String> {
    let reps = suite("holder", &SuiteOptions::default())?;
    all_pass(&reps)?;
    let mut parts = Vec::new();
    for r in &reps {
        chain_holds(r, "displacement")?;
        if r.instance.contains("qlaplace") {
            let theta = r.constants.get("theta").copied().ok_or("theta missing")?;
            let slope = r.constants["fitted_exponent"];
            ensure(slope >= theta - HOLDER_EXPONENT_MARGIN, || format!("{}: exponent {slope}", r.instance))?;
            parts.push(format!("θ={theta}: {slope:.3}"));
        }
    }
    ensure(parts.len() >= 2, || "missing heat instances".into())?;
    Ok(format!("displacement holds; fitted exponents {}", parts.join(", ")))
}

fn subgradient_suite() -> Result<String, String> {
    let reps = suite("subgradient", &SuiteOptions::default())?;
    all_pass(&reps)?;
    for r in &reps {
        let g = r.constants["gamma"];
        ensure((g - 2f64.powf(0.25 - 0.5)).abs() <= 1e-15, || format!("gamma {g}"))?;
    }
    let grid = LogGrid::default();
    let bad = FunctionSpace::weighted(0.6, 2.0).unwrap();
    let energy = Arc::new(QuadraticEnergy::new(1.0).unwrap());
    match check_subgradient("quadratic", energy, &[1.0], &bad, 1.0, &grid) {
        Err(Error::Precondition(m)) if m.contains("θ < 1/2") => {}
        other => return Err(format!("θ = 0.6 not rejected: {:?}", other.map(|r| r.verdict))),
    }
    Ok(format!("{} instances pass with γ = 2^(θ-1/2); θ = 0.6 rejected", reps.len()))
}

fn qlaplace_suite() -> Result<String, String> {
    let reps = suite("qlaplace-regularity", &SuiteOptions::default())?;
    all_pass(&reps)?;
    let mut families = std::collections::BTreeSet::new();
    for r in &reps {
        chain_holds(r, "indicators-agree")?;
        families.insert(r.instance.split_whitespace().next().unwrap_or("").to_string());
    }
    ensure(reps.len() >= 18, || format!("{} samples", reps.len()))?;
    ensure(families.len() >= 3, || format!("families {families:?}"))?;
    let (alpha, r) = exponent_map(4.0, 0.25, 2.0);
    ensure((alpha - 2.0 / 3.0).abs() < 1e-15 && (r - 3.0).abs() < 1e-15, || format!("({alpha}, {r})"))?;
    Ok(format!(
        "{} samples over {} families agree; (α, r) = ({alpha:.4}, {r})",
        reps.len(),
        families.len()
    ))
}

fn perturbation_suite() -> Result<String, String> {
    let reps = suite("perturbation", &SuiteOptions::default())?;
    all_pass(&reps)?;
    let mut rows = 0;
    for r in &reps {
        rows += chain_holds(r, "affine-bound")?;
        rows += chain_holds(r, "indicators-agree")?;
    }
    ensure(reps.iter().any(|r| r.instance.contains("zero")), || "no B = 0 instance".into())?;
    ensure(reps.iter().any(|r| r.instance.contains("sin")), || "no sin instance".into())?;
    Ok(format!("{} instances, {rows} rows hold", reps.len()))
}

fn regularizing_suite() -> Result<String, String> {
    let reps = suite("regularizing", &SuiteOptions::default())?;
    all_pass(&reps)?;
    let lin = reps.iter().find(|r| r.theorem == "regularizing-linear").ok_or("no linear instance")?;
    let sup = lin.constants["measured_sup"];
    let err = (sup - (-1.0f64).exp()).abs();
    ensure(err <= LINEAR_SUP_TOL, || format!("sup {sup}"))?;
    let mut n = 0;
    for r in reps.iter().filter(|r| r.theorem == "regularizing") {
        chain_holds(r, "norm-lower")?;
        chain_holds(r, "norm-upper")?;
        n += 1;
    }
    ensure(n > 0, || "no subgradient instances".into())?;
    Ok(format!("sup |tAS(t)| = {sup:.6} (1/e off by {err:.1e}); {n} two-sided chains hold"))
}

fn main() {
    // `cargo test -- --list` and filters from other harnesses are ignored
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let secs = |s| Some(Duration::from_secs(s));
    let results = [
        run(1, "pointwise chains", secs(60), pointwise_suite),
        run(2, "norm equivalence", secs(120), norm_equivalence_suite),
        run(3, "hardy operator", secs(10), hardy_suite),
        run(4, "mean method", None, mean_k_suite),
        run(5, "exponential formula", None, exp_formula_suite),
        run(6, "hoelder orbits", None, holder_suite),
        run(7, "subgradient chain", None, subgradient_suite),
        run(8, "q-laplace regularity", None, qlaplace_suite),
        run(9, "perturbation", None, perturbation_suite),
        run(10, "regularizing semigroups", None, regularizing_suite),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
