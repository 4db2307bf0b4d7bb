//! Nodewise inequality reports with a verdict, serialized to JSON and flat CSV.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::fmt_f64;

/// Version of the JSON layout of [`TheoremReport`].
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// A hypothesis of the estimate failed on the instance, so no verdict is given.
    Withheld,
}

/// One inequality `lhs ≤ rhs` at a node, where `rhs` already contains the constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub chain: String,
    pub node_t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    /// `lhs − rhs`; the row holds when it is at most `slack`.
    pub residual: f64,
    pub slack: f64,
    /// False when an upper bound of `K` stands where the chain needs a lower bound.
    pub certified: bool,
}

impl Row {
    pub fn holds(&self) -> bool {
        self.residual <= self.slack
    }

    /// `lhs / rhs` with `0/0 = 0`.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else if self.rhs == 0.0 {
            f64::INFINITY
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Aggregate of the rows of one chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainSummary {
    pub chain: String,
    pub constant: f64,
    pub rows: usize,
    pub violations: usize,
    /// Largest `lhs/rhs` over the rows.
    pub worst_ratio: f64,
    /// Largest `residual − slack` (negative when every row holds).
    pub worst_excess: f64,
    pub certified: bool,
}

/// Outcome of checking one estimate on one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub schema_version: u32,
    pub theorem: String,
    pub instance: String,
    /// Constants and measured quantities, keyed by name.
    pub constants: BTreeMap<String, f64>,
    pub rows: Vec<Row>,
    pub summary: Vec<ChainSummary>,
    /// Largest slack granted to any row.
    pub slack_budget: f64,
    pub notes: Vec<String>,
    pub hypothesis_violations: Vec<String>,
    pub verdict: Verdict,
}

fn residual(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs {
        0.0
    } else {
        lhs - rhs
    }
}

impl TheoremReport {
    pub fn new(theorem: impl Into<String>, instance: impl Into<String>) -> Self {
        TheoremReport {
            schema_version: SCHEMA_VERSION,
            theorem: theorem.into(),
            instance: instance.into(),
            constants: BTreeMap::new(),
            rows: Vec::new(),
            summary: Vec::new(),
            slack_budget: 0.0,
            notes: Vec::new(),
            hypothesis_violations: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) {
        self.constants.insert(name.into(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        let text = text.into();
        if !self.notes.contains(&text) {
            self.notes.push(text);
        }
    }

    pub fn hypothesis_violation(&mut self, text: impl Into<String>) {
        self.hypothesis_violations.push(text.into());
    }

    /// Records `lhs ≤ rhs + slack`; `rhs` already includes `constant`.
    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        chain: &str,
        t: f64,
        lhs: f64,
        rhs: f64,
        constant: f64,
        slack: f64,
        certified: bool,
    ) {
        self.rows.push(Row {
            chain: chain.to_string(),
            node_t: t,
            lhs,
            rhs,
            constant,
            residual: residual(lhs, rhs),
            slack,
            certified,
        });
    }

    /// Records a yes/no condition as the row `[not ok] ≤ 0`.
    pub fn push_flag(&mut self, chain: &str, t: f64, ok: bool) {
        self.push(chain, t, if ok { 0.0 } else { 1.0 }, 0.0, 1.0, 0.0, true);
    }

    /// Computes the chain summaries and the verdict.
    pub fn finish(mut self) -> Self {
        let mut order: Vec<String> = Vec::new();
        let mut by_chain: BTreeMap<String, ChainSummary> = BTreeMap::new();
        for r in &self.rows {
            let s = by_chain.entry(r.chain.clone()).or_insert_with(|| {
                order.push(r.chain.clone());
                ChainSummary {
                    chain: r.chain.clone(),
                    constant: r.constant,
                    rows: 0,
                    violations: 0,
                    worst_ratio: 0.0,
                    worst_excess: f64::NEG_INFINITY,
                    certified: true,
                }
            });
            s.rows += 1;
            if !r.holds() {
                s.violations += 1;
            }
            s.worst_ratio = s.worst_ratio.max(r.ratio());
            let excess = r.residual - r.slack;
            if excess > s.worst_excess || excess.is_nan() {
                s.worst_excess = excess;
            }
            s.certified &= r.certified;
        }
        self.summary = order.iter().map(|c| by_chain.remove(c).unwrap()).collect();
        self.slack_budget = self.rows.iter().map(|r| r.slack).fold(0.0, f64::max);
        self.verdict = if !self.hypothesis_violations.is_empty() {
            Verdict::Withheld
        } else if self.rows.iter().all(Row::holds) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.holds()).count()
    }

    pub fn rows_of<'a>(&'a self, chain: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.chain == chain)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut s = self.to_json()?;
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }

    /// Flat CSV: `theorem,instance,node_t,lhs,rhs,constant,residual,chain,slack,holds`.
    pub fn write_csv<W: Write>(&self, w: W, header: bool) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        if header {
            wr.write_record(CSV_HEADER)?;
        }
        for r in &self.rows {
            wr.write_record([
                self.theorem.clone(),
                self.instance.clone(),
                fmt_f64(r.node_t),
                fmt_f64(r.lhs),
                fmt_f64(r.rhs),
                fmt_f64(r.constant),
                fmt_f64(r.residual),
                r.chain.clone(),
                fmt_f64(r.slack),
                (if r.holds() { "1" } else { "0" }).to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// One line for the summary table.
    pub fn summary_line(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Withheld => "WITHHELD",
        };
        format!(
            "{:<8} {:<20} {:<44} rows={:<6} violations={}",
            verdict,
            self.theorem,
            self.instance,
            self.rows.len(),
            self.violations()
        )
    }
}

pub const CSV_HEADER: [&str; 10] = [
    "theorem", "instance", "node_t", "lhs", "rhs", "constant", "residual", "chain", "slack", "holds",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let mut r = TheoremReport::new("x", "y");
        r.push("a", 1.0, 1.0, 2.0, 1.0, 0.0, true);
        r.push("a", 2.0, f64::INFINITY, f64::INFINITY, 1.0, 0.0, true);
        let r = r.finish();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.summary[0].rows, 2);

        let mut f = TheoremReport::new("x", "y");
        f.push("a", 1.0, 3.0, 2.0, 1.0, 0.5, true);
        assert_eq!(f.finish().verdict, Verdict::Fail);

        let mut w = TheoremReport::new("x", "y");
        w.push_flag("a", 0.0, true);
        w.hypothesis_violation("domination fails");
        assert_eq!(w.finish().verdict, Verdict::Withheld);
    }

    #[test]
    fn nan_rows_fail() {
        let mut r = TheoremReport::new("x", "y");
        r.push("a", 1.0, f64::NAN, 1.0, 1.0, 1.0, true);
        assert_eq!(r.finish().verdict, Verdict::Fail);
    }
}
