//! Geometric grids on (0, ∞) and extended-valued functions sampled on them.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Construction parameters of a [`LogGrid`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub t_min: f64,
    pub t_max: f64,
    pub n_nodes: usize,
}

impl Default for GridParams {
    /// 256 nodes per decade over `[1e-6, 1e2]`, so every power of ten is a node.
    fn default() -> Self {
        GridParams {
            t_min: 1e-6,
            t_max: 1e2,
            n_nodes: 2049,
        }
    }
}

#[derive(Debug)]
struct GridData {
    params: GridParams,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Geometrically spaced nodes `t_i = t_min * r^i` with trapezoidal weights in `t`.
///
/// Cloning is cheap; grids compare equal when their parameters agree.
#[derive(Clone, Debug)]
pub struct LogGrid(Arc<GridData>);

impl PartialEq for LogGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.params == other.0.params
    }
}

impl Default for LogGrid {
    fn default() -> Self {
        LogGrid::from_params(GridParams::default()).expect("default grid is valid")
    }
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, n_nodes: usize) -> Result<Self> {
        Self::from_params(GridParams {
            t_min,
            t_max,
            n_nodes,
        })
    }

    pub fn from_params(params: GridParams) -> Result<Self> {
        let GridParams {
            t_min,
            t_max,
            n_nodes,
        } = params;
        if !(t_min > 0.0 && t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
            return Err(Error::Parameter(format!(
                "grid needs 0 < t_min < t_max < inf, got [{t_min}, {t_max}]"
            )));
        }
        if n_nodes < 2 {
            return Err(Error::Parameter("grid needs at least 2 nodes".into()));
        }
        let log_ratio = (t_max / t_min).ln() / (n_nodes - 1) as f64;
        let mut nodes: Vec<f64> = (0..n_nodes)
            .map(|i| t_min * (log_ratio * i as f64).exp())
            .collect();
        nodes[0] = t_min;
        nodes[n_nodes - 1] = t_max;
        // snap nodes that sit within rounding of a power of ten
        for t in nodes.iter_mut() {
            let p = t.log10().round();
            let ten = 10f64.powf(p);
            if ((*t - ten) / ten).abs() < 1e-12 {
                *t = ten;
            }
        }
        let mut weights = vec![0.0; n_nodes];
        for i in 0..n_nodes - 1 {
            let half = 0.5 * (nodes[i + 1] - nodes[i]);
            weights[i] += half;
            weights[i + 1] += half;
        }
        Ok(LogGrid(Arc::new(GridData {
            params,
            nodes,
            weights,
        })))
    }

    /// Grid whose consecutive ratio is `2^(1/per_octave)`, so dilation by 2 is an index shift.
    pub fn dyadic(t_min: f64, octaves: usize, per_octave: usize) -> Result<Self> {
        if per_octave == 0 || octaves == 0 {
            return Err(Error::Parameter("dyadic grid needs octaves, per_octave > 0".into()));
        }
        let n = octaves * per_octave + 1;
        Self::new(t_min, t_min * 2f64.powi(octaves as i32), n)
    }

    pub fn params(&self) -> GridParams {
        self.0.params
    }
    pub fn t_min(&self) -> f64 {
        self.0.params.t_min
    }
    pub fn t_max(&self) -> f64 {
        self.0.params.t_max
    }
    pub fn len(&self) -> usize {
        self.0.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn nodes(&self) -> &[f64] {
        &self.0.nodes
    }
    /// Trapezoidal weights in `t`.
    pub fn weights(&self) -> &[f64] {
        &self.0.weights
    }
    /// `ln(t_{i+1}/t_i)`.
    pub fn log_step(&self) -> f64 {
        (self.t_max() / self.t_min()).ln() / (self.len() - 1) as f64
    }

    /// Continuous node index of `t` (log-linear position).
    pub fn position(&self, t: f64) -> f64 {
        (t / self.t_min()).ln() / self.log_step()
    }

    /// Index of the node nearest to `t` in log scale.
    pub fn nearest_index(&self, t: f64) -> usize {
        let u = self.position(t).round();
        u.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    /// Grid with the same spacing truncated to nodes `<= t_hi`, keeping at least two nodes.
    pub fn truncated(&self, t_hi: f64) -> Result<Self> {
        let k = self.0.nodes.iter().rposition(|&t| t <= t_hi * (1.0 + 1e-12));
        let k = k.unwrap_or(0).max(1);
        LogGrid::new(self.t_min(), self.0.nodes[k], k + 1)
    }

    /// Weights `c_i >= 0` with `sum c_i g_i` equal to the integral over `[lo, hi] ∩ [t_min, t_max]`
    /// of the piecewise-linear interpolant of `g`.
    pub fn window_weights(&self, lo: f64, hi: f64) -> Vec<(usize, f64)> {
        let nodes = self.nodes();
        let n = nodes.len();
        let a = lo.max(nodes[0]);
        let b = hi.min(nodes[n - 1]);
        let mut out: Vec<(usize, f64)> = Vec::new();
        if !(a < b) {
            return out;
        }
        let mut push = |i: usize, w: f64| {
            if w > 0.0 {
                if let Some(last) = out.iter_mut().rev().take(2).find(|(j, _)| *j == i) {
                    last.1 += w;
                } else {
                    out.push((i, w));
                }
            }
        };
        for i in 0..n - 1 {
            let (l, r) = (nodes[i], nodes[i + 1]);
            if r <= a || l >= b {
                continue;
            }
            let width = r - l;
            let c0 = a.max(l);
            let c1 = b.min(r);
            let s0 = (c0 - l) / width;
            let s1 = (c1 - l) / width;
            // integral over [c0, c1] of (1-s) g_i + s g_{i+1}
            let len = c1 - c0;
            let mean_s = 0.5 * (s0 + s1);
            push(i, len * (1.0 - mean_s));
            push(i + 1, len * mean_s);
        }
        out
    }
}

/// How values between nodes are interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolant {
    /// Linear between nodes; constant `f(t_min)` on `(0, t_min]`.
    Linear,
    /// Value `f_i` on `(t_{i-1}, t_i]`, value `f_0` on `(0, t_0]`.
    Step,
}

/// A `[0, ∞]`-valued function sampled on a [`LogGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: LogGrid,
    values: Vec<f64>,
    interp: Interpolant,
}

impl GridFunction {
    pub fn new(grid: LogGrid, values: Vec<f64>) -> Result<Self> {
        Self::with_interpolant(grid, values, Interpolant::Linear)
    }

    pub fn with_interpolant(grid: LogGrid, values: Vec<f64>, interp: Interpolant) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Structural(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(Error::Structural(format!(
                "grid function values must lie in [0, inf], found {v}"
            )));
        }
        Ok(GridFunction {
            grid,
            values,
            interp,
        })
    }

    /// Samples `f` at every node; NaN or negative samples are rejected.
    pub fn from_fn(grid: &LogGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn constant(grid: &LogGrid, c: f64) -> Result<Self> {
        Self::new(grid.clone(), vec![c; grid.len()])
    }

    /// Step representation of the indicator of `(0, tau)`; the cut is placed at the
    /// largest node not exceeding `tau`, which is exact whenever `tau` is a node.
    pub fn indicator_below(grid: &LogGrid, tau: f64) -> Self {
        let values = grid
            .nodes()
            .iter()
            .map(|&t| if t <= tau * (1.0 + 1e-12) { 1.0 } else { 0.0 })
            .collect();
        GridFunction {
            grid: grid.clone(),
            values,
            interp: Interpolant::Step,
        }
    }

    pub fn grid(&self) -> &LogGrid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn interpolant(&self) -> Interpolant {
        self.interp
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| f(t, v))
            .collect();
        Self::with_interpolant(self.grid.clone(), values, self.interp)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::Parameter(format!("scale factor must be >= 0, got {c}")));
        }
        self.map(|_, v| if v == 0.0 { 0.0 } else { c * v })
    }

    /// Pointwise combination of two functions on the same grid. The result is `Linear`
    /// unless both inputs are `Step`.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Structural("grid functions live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let interp = if self.interp == Interpolant::Step && other.interp == Interpolant::Step {
            Interpolant::Step
        } else {
            Interpolant::Linear
        };
        Self::with_interpolant(self.grid.clone(), values, interp)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Value at an arbitrary `t > 0` according to the interpolant.
    pub fn eval(&self, t: f64) -> f64 {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        if t <= nodes[0] {
            return self.values[0];
        }
        if t >= nodes[n - 1] {
            return self.values[n - 1];
        }
        let j = nodes.partition_point(|&s| s < t);
        match self.interp {
            Interpolant::Step => self.values[j],
            Interpolant::Linear => {
                let (l, r) = (nodes[j - 1], nodes[j]);
                let s = (t - l) / (r - l);
                lerp(self.values[j - 1], self.values[j], s)
            }
        }
    }

    /// Writes `t,value` rows; `+∞` is written as `inf`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "value"])?;
        for (t, v) in self.grid.nodes().iter().zip(&self.values) {
            wr.write_record([fmt_f64(*t), fmt_f64(*v)])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Structural(e.to_string()))
    }

    /// Reads `t,value` rows back onto `grid`; node positions must match.
    pub fn read_csv<R: std::io::Read>(grid: &LogGrid, r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut values = Vec::with_capacity(grid.len());
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let t = parse_f64(rec.get(0).unwrap_or(""))?;
            let v = parse_f64(rec.get(1).unwrap_or(""))?;
            let node = *grid
                .nodes()
                .get(i)
                .ok_or_else(|| Error::Structural("more rows than grid nodes".into()))?;
            if ((t - node) / node).abs() > 1e-9 {
                return Err(Error::Structural(format!("row {i}: t = {t} is not node {node}")));
            }
            values.push(v);
        }
        Self::new(grid.clone(), values)
    }
}

pub(crate) fn lerp(a: f64, b: f64, s: f64) -> f64 {
    if s <= 0.0 {
        a
    } else if s >= 1.0 {
        b
    } else if a.is_infinite() || b.is_infinite() {
        f64::INFINITY
    } else {
        a + s * (b - a)
    }
}

/// Shortest round-trip float formatting with `inf` for infinity.
pub fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:e}")
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    let s = s.trim();
    match s {
        "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|e| Error::Structural(format!("cannot parse '{s}' as a number: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_decades_as_nodes() {
        let g = LogGrid::default();
        for p in -6..=2 {
            let t = 10f64.powi(p);
            let i = g.nearest_index(t);
            assert_eq!(g.nodes()[i], t);
        }
    }

    #[test]
    fn constant_quadrature_is_interval_length() {
        let g = LogGrid::default();
        let s: f64 = g.weights().iter().sum();
        let exact = g.t_max() - g.t_min();
        assert!(((s - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn window_weights_integrate_linear_functions_exactly() {
        let g = LogGrid::new(0.01, 10.0, 40).unwrap();
        let ww = g.window_weights(0.0333, 2.71);
        let s: f64 = ww.iter().map(|(i, w)| w * g.nodes()[*i]).sum();
        let exact = 0.5 * (2.71f64.powi(2) - 0.0333f64.powi(2));
        assert!((s - exact).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_keeps_infinity() {
        let g = LogGrid::new(0.1, 1.0, 3).unwrap();
        let f = GridFunction::new(g.clone(), vec![1.5, f64::INFINITY, 0.0]).unwrap();
        let s = f.to_csv_string().unwrap();
        assert!(s.contains("inf"));
        let back = GridFunction::read_csv(&g, s.as_bytes()).unwrap();
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn rejects_negative_and_nan() {
        let g = LogGrid::new(0.1, 1.0, 2).unwrap();
        assert!(GridFunction::new(g.clone(), vec![-1.0, 0.0]).is_err());
        assert!(GridFunction::new(g, vec![f64::NAN, 0.0]).is_err());
    }
}
