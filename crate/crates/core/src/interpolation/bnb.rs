//! Lipschitz branch and bound over a cube in `R^d`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Result of a branch-and-bound minimization.
#[derive(Clone, Debug)]
pub struct BnbResult {
    /// Certified lower bound of the minimum over the cube.
    pub lower: f64,
    /// Best value found.
    pub upper: f64,
    pub argmin: Vec<f64>,
    pub evaluations: usize,
    /// Whether `upper − lower ≤ abs_tol` was reached within the budget.
    pub converged: bool,
}

struct Cell {
    lb: f64,
    center: Vec<f64>,
    half: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.lb == other.lb
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // reversed so that the heap pops the smallest lower bound first
    fn cmp(&self, other: &Self) -> Ordering {
        other.lb.total_cmp(&self.lb)
    }
}

/// Minimizes `f` over the cube `center ± half_width` given a Lipschitz constant `lip`
/// with respect to the Euclidean norm. `seed` is a known point and its value.
pub fn minimize(
    f: impl Fn(&[f64]) -> f64,
    lip: f64,
    center: &[f64],
    half_width: f64,
    abs_tol: f64,
    max_evaluations: usize,
    seed: Option<(Vec<f64>, f64)>,
) -> BnbResult {
    let d = center.len();
    let diag = (d as f64).sqrt();
    let mut evaluations = 1;
    let f0 = f(center);
    let (mut best_x, mut best) = (center.to_vec(), f0);
    if let Some((x, v)) = seed {
        if v < best {
            best = v;
            best_x = x;
        }
    }
    if half_width <= 0.0 || !lip.is_finite() {
        let lower = if half_width <= 0.0 { f0 } else { f64::NEG_INFINITY };
        return BnbResult {
            lower: lower.min(best),
            upper: best,
            argmin: best_x,
            evaluations,
            converged: half_width <= 0.0,
        };
    }
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        lb: f0 - lip * half_width * diag,
        center: center.to_vec(),
        half: half_width,
    });
    // smallest lower bound among discarded cells
    let mut pruned = f64::INFINITY;
    let n_children = 1usize << d;
    while let Some(cell) = heap.pop() {
        if cell.lb >= best - abs_tol {
            pruned = pruned.min(cell.lb);
            break;
        }
        if evaluations + n_children > max_evaluations {
            heap.push(cell);
            break;
        }
        let h = 0.5 * cell.half;
        for mask in 0..n_children {
            let c: Vec<f64> = (0..d)
                .map(|k| cell.center[k] + if mask >> k & 1 == 1 { h } else { -h })
                .collect();
            let v = f(&c);
            evaluations += 1;
            if v < best {
                best = v;
                best_x = c.clone();
            }
            let lb = v - lip * h * diag;
            if lb >= best - abs_tol {
                pruned = pruned.min(lb);
            } else {
                heap.push(Cell { lb, center: c, half: h });
            }
        }
    }
    let open = heap.peek().map(|c| c.lb).unwrap_or(f64::INFINITY);
    let lower = pruned.min(open).min(best);
    BnbResult {
        lower,
        upper: best,
        argmin: best_x,
        evaluations,
        converged: best - lower <= abs_tol * (1.0 + 1e-12),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_kink_minimum() {
        let f = |v: &[f64]| (2.0 - v[0]).abs() + 0.5 * v[0].abs();
        let r = minimize(f, 1.5, &[2.0], 4.0, 1e-10, 100_000, None);
        assert!(r.converged);
        assert!((r.lower - 1.0).abs() < 1e-9 && (r.upper - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_dimensional_bowl() {
        let f = |v: &[f64]| ((v[0] - 0.3).powi(2) + (v[1] + 0.2).powi(2)).sqrt();
        let r = minimize(f, 1.0, &[0.0, 0.0], 1.0, 1e-7, 1_000_000, None);
        assert!(r.converged && r.lower <= 0.0 + 1e-12 && r.upper < 1e-7);
    }
}
