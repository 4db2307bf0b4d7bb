use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{
    q_laplace, AbsEnergy, Energy, IntervalIndicator, MatrixOperator, OpRef, QLaplaceEnergy,
    QuadraticEnergy, ScalarLinear, SubgradientOperator,
};
use crate::error::{Error, Result};
use crate::normed::NormedSpace;

/// Serializable description of a shipped operator.
///
/// JSON form: `{"kind": "scalar", "a": 1.0, "omega": 0.0}`,
/// `{"kind": "matrix", "rows": [[2,1],[1,2]]}` or `{"kind": "matrix", "path": "m.csv"}`,
/// `{"kind": "energy", "energy": "abs", "k": 1.0}`, `{"kind": "qlaplace", "q": 3, "n": 64}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OperatorConfig {
    Scalar {
        a: f64,
        #[serde(default)]
        omega: f64,
    },
    Matrix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
        #[serde(default)]
        omega: f64,
    },
    Energy {
        /// `abs`, `quadratic` or `indicator`.
        energy: String,
        #[serde(default = "one")]
        k: f64,
    },
    Qlaplace { q: f64, n: usize },
}

fn one() -> f64 {
    1.0
}

impl OperatorConfig {
    /// Parses the command-line form `kind:key=value,...`, e.g. `scalar:a=1,omega=0`,
    /// `qlaplace:q=3,n=64`, `energy:energy=abs,k=1`, `matrix:path=m.csv`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = Vec::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("expected key=value in '{part}'")))?;
            kv.push((k.trim().to_string(), v.trim().to_string()));
        }
        let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let num = |key: &str, default: Option<f64>| -> Result<f64> {
            match get(key) {
                Some(v) => v
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad number for {key}: '{v}'"))),
                None => default.ok_or_else(|| Error::Parameter(format!("missing {key} in '{s}'"))),
            }
        };
        for (k, _) in &kv {
            let allowed: &[&str] = match kind {
                "scalar" => &["a", "omega"],
                "matrix" => &["path", "omega"],
                "energy" => &["energy", "k"],
                "qlaplace" => &["q", "n"],
                _ => &[],
            };
            if !allowed.contains(&k.as_str()) && !allowed.is_empty() {
                return Err(Error::Parameter(format!("unknown key '{k}' for {kind}")));
            }
        }
        match kind {
            "scalar" => Ok(OperatorConfig::Scalar {
                a: num("a", Some(1.0))?,
                omega: num("omega", Some(0.0))?,
            }),
            "matrix" => Ok(OperatorConfig::Matrix {
                rows: None,
                path: Some(PathBuf::from(get("path").ok_or_else(|| {
                    Error::Parameter("matrix operator needs path=<csv>".into())
                })?)),
                omega: num("omega", Some(0.0))?,
            }),
            "energy" => Ok(OperatorConfig::Energy {
                energy: get("energy").unwrap_or("abs").to_string(),
                k: num("k", Some(1.0))?,
            }),
            "qlaplace" => {
                let n = num("n", Some(64.0))?;
                if n < 1.0 || n.fract() != 0.0 {
                    return Err(Error::Parameter(format!("n must be a positive integer, got {n}")));
                }
                Ok(OperatorConfig::Qlaplace {
                    q: num("q", Some(2.0))?,
                    n: n as usize,
                })
            }
            other => Err(Error::Parameter(format!(
                "unknown operator kind '{other}' (expected scalar, matrix, energy, qlaplace)"
            ))),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn build(&self) -> Result<OpRef> {
        Ok(match self {
            OperatorConfig::Scalar { a, omega } => Arc::new(ScalarLinear::shifted(*a, *omega)?),
            OperatorConfig::Matrix { .. } => Arc::new(self.matrix_operator()?.expect("matrix kind")),
            OperatorConfig::Energy { .. } => {
                Arc::new(SubgradientOperator::new(self.energy()?.expect("energy kind")))
            }
            OperatorConfig::Qlaplace { q, n } => Arc::new(q_laplace(*q, *n)?),
        })
    }

    /// The convex energy behind subgradient kinds (`energy` and `qlaplace`).
    pub fn energy(&self) -> Result<Option<Arc<dyn Energy>>> {
        Ok(match self {
            OperatorConfig::Energy { energy, k } => Some(match energy.as_str() {
                "abs" => Arc::new(AbsEnergy::new(*k)) as Arc<dyn Energy>,
                "quadratic" => Arc::new(QuadraticEnergy::new(*k)?),
                "indicator" => Arc::new(IntervalIndicator::new(*k)),
                other => {
                    return Err(Error::Parameter(format!(
                        "unknown energy '{other}' (expected abs, quadratic, indicator)"
                    )))
                }
            }),
            OperatorConfig::Qlaplace { q, n } => Some(Arc::new(QLaplaceEnergy::new(*q, *n)?)),
            _ => None,
        })
    }

    /// The concrete operator for the `matrix` kind.
    pub fn matrix_operator(&self) -> Result<Option<MatrixOperator>> {
        let OperatorConfig::Matrix { rows, path, omega } = self else {
            return Ok(None);
        };
        let m = match (rows, path) {
            (Some(r), _) => matrix_from_rows(r)?,
            (None, Some(p)) => load_matrix_csv(p)?,
            (None, None) => return Err(Error::Parameter("matrix operator needs rows or path".into())),
        };
        let n = m.nrows();
        Ok(Some(MatrixOperator::new(m, *omega, NormedSpace::euclidean(n))?))
    }

    /// Command-line form of the configuration.
    pub fn label(&self) -> String {
        match self {
            OperatorConfig::Scalar { a, omega } => format!("scalar:a={a},omega={omega}"),
            OperatorConfig::Matrix { rows, path, omega } => match (rows, path) {
                (_, Some(p)) => format!("matrix:path={},omega={omega}", p.display()),
                (Some(r), None) => format!("matrix:{}x{},omega={omega}", r.len(), r.len()),
                (None, None) => "matrix".into(),
            },
            OperatorConfig::Energy { energy, k } => format!("energy:energy={energy},k={k}"),
            OperatorConfig::Qlaplace { q, n } => format!("qlaplace:q={q},n={n}"),
        }
    }

    /// Dimension of the underlying space, when known without building.
    pub fn dim(&self) -> Option<usize> {
        match self {
            OperatorConfig::Scalar { .. } | OperatorConfig::Energy { .. } => Some(1),
            OperatorConfig::Qlaplace { n, .. } => Some(*n),
            OperatorConfig::Matrix { rows, .. } => rows.as_ref().map(|r| r.len()),
        }
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Structural("matrix rows must form a square array".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Reads a square matrix from a headerless CSV file.
pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Structural(format!("bad matrix entry '{s}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    matrix_from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cli_forms() {
        assert_eq!(
            OperatorConfig::parse("scalar:a=2,omega=0.5").unwrap(),
            OperatorConfig::Scalar { a: 2.0, omega: 0.5 }
        );
        assert_eq!(
            OperatorConfig::parse("qlaplace:q=3,n=64").unwrap(),
            OperatorConfig::Qlaplace { q: 3.0, n: 64 }
        );
        assert!(OperatorConfig::parse("banana:x=1").is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = OperatorConfig::from_json(r#"{"kind":"matrix","rows":[[2,1],[1,2]]}"#).unwrap();
        let op = s.build().unwrap();
        assert_eq!(op.space().dim, 2);
        let back: OperatorConfig = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
