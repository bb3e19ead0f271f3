//! Output documents, their JSON and CSV encodings, and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use homlab_core::bs::BeamSplitter;
use homlab_core::joint::JointDistribution;
use homlab_core::numerics::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Beam-splitter setting as recorded in output metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BsMeta {
    Exact {
        #[serde(rename = "T_num")]
        t_num: i64,
        #[serde(rename = "T_den")]
        t_den: i64,
    },
    Angle {
        theta: f64,
    },
}

pub fn rational_parts(t: &BigRational, flag: &str) -> CliResult<(i64, i64)> {
    match (t.numer().to_i64(), t.denom().to_i64()) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(CliError::usage(format!("{flag}: {t} has more digits than the output format holds"))),
    }
}

impl BsMeta {
    pub fn new(bs: &BeamSplitter) -> CliResult<Self> {
        Ok(match bs {
            BeamSplitter::ExactT(t) => {
                let (t_num, t_den) = rational_parts(t, "--bs")?;
                BsMeta::Exact { t_num, t_den }
            }
            BeamSplitter::Angle(theta) => BsMeta::Angle { theta: *theta },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub command: String,
    pub state_a: String,
    pub state_b: String,
    pub bs: BsMeta,
    pub grid_max: usize,
    pub eta_a: Option<f64>,
    pub eta_b: Option<f64>,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Probability missing from the grid: state truncation plus clipping.
    pub tail_deficit: f64,
    /// Every diagonal entry is below `1e-14`.
    pub cnl_verdict: bool,
}

/// A joint distribution as written by `dist` and `lossy`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDocument {
    pub meta: GridMeta,
    /// `grid[m_a][m_b]`.
    pub grid: Vec<Vec<f64>>,
    pub total_mass: f64,
    pub diagnostics: Diagnostics,
}

impl GridDocument {
    pub fn new(meta: GridMeta, dist: &JointDistribution, diagnostics: Diagnostics) -> Self {
        GridDocument {
            meta,
            grid: dist.rows().map(<[f64]>::to_vec).collect(),
            total_mass: dist.total_mass(),
            diagnostics,
        }
    }

    /// `m_a,m_b,P` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m_a,m_b,P\n");
        for (m_a, row) in self.grid.iter().enumerate() {
            for (m_b, p) in row.iter().enumerate() {
                writeln!(out, "{m_a},{m_b},{}", float17(*p)).unwrap();
            }
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses `m_a,m_b,P` lines back into `(m_a, m_b, P)`.
pub fn parse_grid_csv(text: &str) -> Result<Vec<(usize, usize, f64)>, String> {
    let mut lines = text.lines();
    if lines.next() != Some("m_a,m_b,P") {
        return Err("missing m_a,m_b,P header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let mut f = line.split(',');
            let (Some(a), Some(b), Some(p), None) = (f.next(), f.next(), f.next(), f.next()) else {
                return Err(format!("line {}: expected three fields", i + 2));
            };
            let malformed = || format!("line {}: malformed entry '{line}'", i + 2);
            Ok((
                a.parse().map_err(|_| malformed())?,
                b.parse().map_err(|_| malformed())?,
                p.parse().map_err(|_| malformed())?,
            ))
        })
        .collect()
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(contents.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            });
    };
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use homlab_core::bs::BeamSplitter;
    use homlab_core::joint::joint_fs_fs;

    fn doc() -> GridDocument {
        let dist = joint_fs_fs(1, 2, &BeamSplitter::angle(0.7).unwrap(), 3).unwrap();
        let meta = GridMeta {
            command: "dist".into(),
            state_a: "fock:1".into(),
            state_b: "fock:2".into(),
            bs: BsMeta::new(dist.bs()).unwrap(),
            grid_max: 3,
            eta_a: None,
            eta_b: None,
            tool_version: TOOL_VERSION.into(),
        };
        GridDocument::new(
            meta,
            &dist,
            Diagnostics {
                tail_deficit: 0.0,
                cnl_verdict: false,
            },
        )
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let d = doc();
        let back: GridDocument = serde_json::from_str(&to_json(&d)).unwrap();
        assert_eq!(back, d);
        for (x, y) in back.grid.iter().flatten().zip(d.grid.iter().flatten()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let d = doc();
        let rows = parse_grid_csv(&d.to_csv()).unwrap();
        assert_eq!(rows.len(), 16);
        for (a, b, p) in rows {
            assert_eq!(p.to_bits(), d.grid[a][b].to_bits());
        }
        for x in [0.1, 1.0 / 3.0, 5e-324, f64::MAX, 0.0] {
            assert_eq!(float17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert!(parse_grid_csv("a,b\n").is_err());
    }

    #[test]
    fn schema_keys() {
        let v: serde_json::Value = serde_json::from_str(&to_json(&doc())).unwrap();
        assert!(v["meta"]["bs"]["theta"].is_number());
        assert!(v["diagnostics"]["cnl_verdict"].is_boolean());
        let exact = BsMeta::new(&BeamSplitter::balanced()).unwrap();
        assert_eq!(serde_json::to_string(&exact).unwrap(), r#"{"T_num":1,"T_den":2}"#);
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        emit(Some(&path), "first").unwrap();
        emit(Some(&path), "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let bad = dir.path().join("missing").join("out.json");
        assert_eq!(emit(Some(&bad), "x").unwrap_err().code(), 4);
    }
}
