//! Interpolation couples of `[0, ∞]`-valued functions and the K-method.
//!
//! For a couple `(N₀, N₁)` on a normed space the K-function is
//! `K(x,t) = inf_v N₀(x−v) + t N₁(v)`. The infimum is approximated from above by
//! candidate pools (resolvent paths, truncations, segments) and, where possible,
//! bracketed from below by closed forms, dual certificates or Lipschitz branch and bound.

pub mod bnb;
mod couples;
mod methods;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use couples::{
    AccretiveCouple, NormPairCouple, PoweredCouple, RearrangementCouple, SqrtEnergyCouple,
};
pub use methods::{
    interp_bounds, interp_from_profile, interp_function_tau, interpolation_theorem_check, k_vs_full_relation,
    mean_method_tau, trace_method_upper, InterpEstimate, InterpolationTheoremReport,
    MeanMethodReport, RelationReport, TheoremSample, TraceReport,
};

use crate::error::Result;
use crate::grid::{fmt_f64, GridFunction, LogGrid};
use crate::normed::NormedSpace;

/// How a value of `K` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KMethod {
    /// Lipschitz branch and bound over a compact box.
    BruteForce,
    /// Best point on the resolvent path `s ↦ J_s x`.
    Resolvent,
    /// Decreasing rearrangement for the discrete `(L¹, L∞)` couple.
    Rearrangement,
    /// Best of a candidate list, without a lower bound.
    Candidates,
    /// Primal point plus dual certificate.
    Certificate,
    ClosedForm,
}

/// An upper bound for `K(x,t)`, with a certified lower bound when one is available.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KBounds {
    pub upper: f64,
    pub lower: Option<f64>,
    pub argmin: Option<Vec<f64>>,
    pub method: KMethod,
}

impl KBounds {
    pub fn gap(&self) -> Option<f64> {
        self.lower.map(|l| self.upper - l)
    }
}

/// A pair `(N₀, N₁)` of `[0, ∞]`-valued functions on a finite-dimensional normed space.
pub trait Couple: Send + Sync {
    fn name(&self) -> String;
    fn space(&self) -> &NormedSpace;
    fn n0(&self, z: &[f64]) -> f64;
    fn n1(&self, v: &[f64]) -> f64;
    /// Extra candidates for the infimum at `t`.
    fn candidates(&self, _x: &[f64], _t: f64) -> Result<Vec<Vec<f64>>> {
        Ok(Vec::new())
    }
    /// Candidates shared by a whole profile on `grid`.
    fn candidate_pool(&self, x: &[f64], grid: &LogGrid) -> Result<Vec<Vec<f64>>> {
        let per_node: Vec<Vec<Vec<f64>>> = grid
            .nodes()
            .par_iter()
            .map(|&t| self.candidates(x, t))
            .collect::<Result<_>>()?;
        Ok(per_node.into_iter().flatten().collect())
    }
    /// Two-sided bounds from the structure of the couple.
    fn certificate(&self, _x: &[f64], _t: f64) -> Option<KBounds> {
        None
    }
    /// Euclidean radius around `x` outside of which `N₀(x−v) > level`.
    fn search_radius(&self, _x: &[f64], _level: f64) -> Option<f64> {
        None
    }
    /// Lipschitz constants of `v ↦ N₀(x−v)` and of `N₁` on the Euclidean ball of
    /// radius `r` around `x`.
    fn lipschitz_within(&self, _x: &[f64], _r: f64) -> Option<(f64, f64)> {
        None
    }
    /// Label for values that are only upper bounds.
    fn upper_method(&self) -> KMethod {
        KMethod::Candidates
    }
}

/// `N₀(x−v) + t N₁(v)` with `+∞` absorbing.
pub fn cost(couple: &dyn Couple, x: &[f64], v: &[f64], t: f64) -> f64 {
    let a = couple.n0(&crate::linalg::sub(x, v));
    let b = couple.n1(v);
    pair_cost(a, b, t)
}

fn pair_cost(a: f64, b: f64, t: f64) -> f64 {
    if a.is_infinite() || b.is_infinite() {
        f64::INFINITY
    } else {
        a + t * b
    }
}

/// Options for K evaluations.
#[derive(Clone, Copy, Debug)]
pub struct KOptions {
    /// Run branch and bound for a lower bound when the couple allows it.
    pub certify: bool,
    /// Relative gap targeted by branch and bound.
    pub rel_tol: f64,
    pub max_evaluations: usize,
    /// Largest dimension handled by branch and bound.
    pub max_dim: usize,
}

impl Default for KOptions {
    fn default() -> Self {
        KOptions {
            certify: true,
            rel_tol: 1e-10,
            max_evaluations: 200_000,
            max_dim: 3,
        }
    }
}

fn best_of(couple: &dyn Couple, x: &[f64], pool: &[Vec<f64>], t: f64) -> (f64, usize) {
    let mut best = (f64::INFINITY, f64::INFINITY, 0usize);
    for (i, v) in pool.iter().enumerate() {
        let a = couple.n0(&crate::linalg::sub(x, v));
        let b = couple.n1(v);
        let c = pair_cost(a, b, t);
        if c < best.0 || (c == best.0 && b < best.1) {
            best = (c, b, i);
        }
    }
    (best.0, best.2)
}

fn branch_and_bound(
    couple: &dyn Couple,
    x: &[f64],
    t: f64,
    upper: f64,
    seed: &[f64],
    opts: &KOptions,
) -> Option<bnb::BnbResult> {
    if x.len() > opts.max_dim {
        return None;
    }
    let r = couple.search_radius(x, upper)?;
    let (l0, l1) = couple.lipschitz_within(x, r)?;
    let lip = l0 + t * l1;
    let tol = (opts.rel_tol * upper).max(1e-15);
    Some(bnb::minimize(
        |v| cost(couple, x, v, t),
        lip,
        x,
        r,
        tol,
        opts.max_evaluations,
        Some((seed.to_vec(), upper)),
    ))
}

/// `K(x,t)` with default options.
pub fn k_function(couple: &dyn Couple, x: &[f64], t: f64) -> Result<KBounds> {
    k_function_with(couple, x, t, &KOptions::default())
}

pub fn k_function_with(
    couple: &dyn Couple,
    x: &[f64],
    t: f64,
    opts: &KOptions,
) -> Result<KBounds> {
    couple.space().check_dim(x)?;
    if !(t > 0.0) {
        return Err(crate::error::Error::Parameter(format!("K needs t > 0, got {t}")));
    }
    let mut pool = vec![x.to_vec(), vec![0.0; x.len()]];
    pool.extend(couple.candidates(x, t)?);
    let (mut upper, idx) = best_of(couple, x, &pool, t);
    let mut argmin = pool[idx].clone();
    if let Some(c) = couple.certificate(x, t) {
        if c.upper < upper {
            upper = c.upper;
            if let Some(a) = &c.argmin {
                argmin = a.clone();
            }
        }
        return Ok(KBounds {
            upper,
            lower: c.lower.map(|l| l.min(upper)),
            argmin: Some(argmin),
            method: c.method,
        });
    }
    if opts.certify {
        if let Some(r) = branch_and_bound(couple, x, t, upper, &argmin, opts) {
            if r.upper < upper {
                upper = r.upper;
                argmin = r.argmin;
            }
            return Ok(KBounds {
                upper,
                lower: Some(r.lower.min(upper).max(0.0)),
                argmin: Some(argmin),
                method: KMethod::BruteForce,
            });
        }
    }
    Ok(KBounds {
        upper,
        lower: None,
        argmin: Some(argmin),
        method: couple.upper_method(),
    })
}

/// `t ↦ K(x,t)` on a grid.
#[derive(Clone, Debug)]
pub struct KProfile {
    pub couple: String,
    pub x: Vec<f64>,
    pub grid: LogGrid,
    /// Upper bounds `K(x,t_i)`; nondecreasing with `K/t` nonincreasing by construction.
    pub k: Vec<f64>,
    /// Certified lower bounds, when every node has one.
    pub k_lower: Option<Vec<f64>>,
    pub method: KMethod,
    /// Candidate points; `argmin[i]` indexes the minimizer used at node `i`.
    pub pool: Vec<Vec<f64>>,
    pub argmin: Vec<usize>,
}

impl KProfile {
    pub fn k_over_t(&self) -> GridFunction {
        let vals = self
            .k
            .iter()
            .zip(self.grid.nodes())
            .map(|(k, t)| k / t)
            .collect();
        GridFunction::new(self.grid.clone(), vals).expect("K is nonnegative")
    }

    pub fn lower_over_t(&self) -> Option<GridFunction> {
        let l = self.k_lower.as_ref()?;
        let vals = l.iter().zip(self.grid.nodes()).map(|(k, t)| k / t).collect();
        Some(GridFunction::new(self.grid.clone(), vals).expect("K is nonnegative"))
    }

    /// Largest relative gap `(upper − lower)/upper` over the nodes.
    pub fn max_rel_gap(&self) -> Option<f64> {
        let l = self.k_lower.as_ref()?;
        Some(
            self.k
                .iter()
                .zip(l)
                .map(|(u, l)| if *u > 0.0 { (u - l) / u } else { 0.0 })
                .fold(0.0, f64::max),
        )
    }

    /// Largest relative violation of `K` nondecreasing and `K/t` nonincreasing.
    pub fn monotonicity_defect(&self) -> f64 {
        let t = self.grid.nodes();
        let mut worst: f64 = 0.0;
        for i in 1..self.k.len() {
            let (a, b) = (self.k[i - 1], self.k[i]);
            if a.is_finite() && b.is_finite() {
                let s = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
                worst = worst.max((a - b) / s);
                let (qa, qb) = (a / t[i - 1], b / t[i]);
                let s = qa.abs().max(qb.abs()).max(f64::MIN_POSITIVE);
                worst = worst.max((qb - qa) / s);
            }
        }
        worst
    }

    pub fn argmin_at(&self, i: usize) -> &[f64] {
        &self.pool[self.argmin[i]]
    }

    /// CSV with columns `t, K_over_t`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "K_over_t"])?;
        for (t, k) in self.grid.nodes().iter().zip(&self.k) {
            wr.write_record([fmt_f64(*t), fmt_f64(k / t)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Lower envelope `min_i a_i + t b_i` on the grid, ties toward smaller `b`.
fn envelope(pairs: &[(f64, f64)], nodes: &[f64]) -> (Vec<f64>, Vec<usize>) {
    nodes
        .par_iter()
        .map(|&t| {
            let mut best = (f64::INFINITY, f64::INFINITY, 0usize);
            for (i, &(a, b)) in pairs.iter().enumerate() {
                let c = pair_cost(a, b, t);
                if c < best.0 || (c == best.0 && b < best.1) {
                    best = (c, b, i);
                }
            }
            (best.0, best.2)
        })
        .unzip()
}

/// K-profile with default options.
pub fn k_profile(couple: &dyn Couple, x: &[f64], grid: &LogGrid) -> Result<KProfile> {
    k_profile_with(couple, x, grid, &[], &KOptions::default())
}

/// K-profile on `grid` with additional candidate points `extra`.
pub fn k_profile_with(
    couple: &dyn Couple,
    x: &[f64],
    grid: &LogGrid,
    extra: &[Vec<f64>],
    opts: &KOptions,
) -> Result<KProfile> {
    couple.space().check_dim(x)?;
    let nodes = grid.nodes();
    let mut pool = vec![x.to_vec(), vec![0.0; x.len()]];
    pool.extend(extra.iter().cloned());
    pool.extend(couple.candidate_pool(x, grid)?);

    // certified lower bounds: structural certificates first, branch and bound otherwise
    let mut method = couple.upper_method();
    let mut lower: Option<Vec<f64>> = None;
    if couple.certificate(x, nodes[0]).is_some() {
        let certs: Vec<Option<KBounds>> =
            nodes.par_iter().map(|&t| couple.certificate(x, t)).collect();
        if certs.iter().all(|c| c.as_ref().is_some_and(|c| c.lower.is_some())) {
            lower = Some(certs.iter().map(|c| c.as_ref().unwrap().lower.unwrap()).collect());
        }
        for c in certs.iter().flatten() {
            method = c.method;
            if let Some(a) = &c.argmin {
                pool.push(a.clone());
            }
        }
    } else if opts.certify && x.len() <= opts.max_dim {
        let pairs = pool_pairs(couple, x, &pool);
        let (env, idx) = envelope(&pairs, nodes);
        let results: Vec<Option<bnb::BnbResult>> = nodes
            .par_iter()
            .enumerate()
            .map(|(i, &t)| {
                if env[i].is_finite() {
                    branch_and_bound(couple, x, t, env[i], &pool[idx[i]], opts)
                } else {
                    None
                }
            })
            .collect();
        if results.iter().all(|r| r.is_some()) {
            method = KMethod::BruteForce;
            let mut l = Vec::with_capacity(nodes.len());
            for r in results.into_iter().flatten() {
                l.push(r.lower.max(0.0));
                pool.push(r.argmin);
            }
            lower = Some(l);
        }
    }
    let pairs = pool_pairs(couple, x, &pool);
    let (k, argmin) = envelope(&pairs, nodes);
    if let Some(l) = lower.as_mut() {
        for (li, ki) in l.iter_mut().zip(&k) {
            *li = li.min(*ki);
        }
    }
    Ok(KProfile {
        couple: couple.name(),
        x: x.to_vec(),
        grid: grid.clone(),
        k,
        k_lower: lower,
        method,
        pool,
        argmin,
    })
}

fn pool_pairs(couple: &dyn Couple, x: &[f64], pool: &[Vec<f64>]) -> Vec<(f64, f64)> {
    pool.par_iter()
        .map(|v| (couple.n0(&crate::linalg::sub(x, v)), couple.n1(v)))
        .collect()
}
