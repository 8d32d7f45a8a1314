//! File formats: matrix/ratings/polar/population CSVs and the embedding
//! JSON. Floats are written with 17 significant digits so round trips are
//! exact and repeated runs are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::embedding::{polar, EmbeddingSet};
use crate::error::{Error, Result};
use crate::hodge::Ratings;
use crate::ingest::Strengths;
use crate::matrix::EvaluationMatrix;

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// `label,<label_0>,...` header then one row of advantages per agent.
pub fn matrix_to_csv(m: &EvaluationMatrix) -> String {
    let mut out = String::new();
    out.push_str("label");
    for label in m.labels() {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for i in 0..m.n() {
        out.push_str(&m.labels()[i]);
        for j in 0..m.n() {
            out.push(',');
            out.push_str(&fmt_float(m.get(i, j)));
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(m: &EvaluationMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, matrix_to_csv(m))?;
    Ok(())
}

/// Parses the matrix CSV format back into a validated matrix.
pub fn read_matrix_csv(path: impl AsRef<Path>, skew_tolerance: f64) -> Result<EvaluationMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix_csv(&text, skew_tolerance)
}

pub fn parse_matrix_csv(text: &str, skew_tolerance: f64) -> Result<EvaluationMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty matrix file".into(),
    })?;
    let mut fields = header.split(',');
    if fields.next() != Some("label") {
        return Err(Error::Parse {
            line: 1,
            message: "matrix CSV must start with a `label` header".into(),
        });
    }
    let labels: Vec<String> = fields.map(String::from).collect();
    let n = labels.len();
    if n == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "matrix CSV has no agent columns".into(),
        });
    }
    let mut entries = DMatrix::zeros(n, n);
    let mut row_count = 0usize;
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        if row_count >= n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than {n} data rows"),
            });
        }
        let mut fields = line.split(',');
        let label = fields.next().unwrap_or_default();
        if label != labels[row_count] {
            return Err(Error::Parse {
                line: line_no,
                message: format!(
                    "row label `{label}` does not match header order (`{}`)",
                    labels[row_count]
                ),
            });
        }
        for j in 0..n {
            let field = fields.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected {n} values, found {j}"),
            })?;
            entries[(row_count, j)] = field.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{field}` is not a float"),
            })?;
        }
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than {n} values in row"),
            });
        }
        row_count += 1;
    }
    if row_count != n {
        return Err(Error::Parse {
            line: row_count + 1,
            message: format!("expected {n} data rows, found {row_count}"),
        });
    }
    EvaluationMatrix::new(entries, labels, skew_tolerance)
}

/// `label,rating` rows.
pub fn ratings_to_csv(r: &Ratings) -> String {
    let mut out = String::from("label,rating\n");
    for (label, value) in r.labels().iter().zip(r.values()) {
        let _ = writeln!(out, "{label},{}", fmt_float(*value));
    }
    out
}

/// `label,strength` rows.
pub fn strengths_to_csv(s: &Strengths) -> String {
    let mut out = String::from("label,strength\n");
    for (label, value) in s.labels().iter().zip(s.values()) {
        let _ = writeln!(out, "{label},{}", fmt_float(*value));
    }
    out
}

/// One mode of the embedding JSON.
#[derive(Debug, Serialize, Deserialize)]
pub struct EmbeddingModeJson {
    pub mode_index: usize,
    pub omega: f64,
    pub importance: f64,
    /// [y1, y2] per agent, ordered as the matrix labels.
    pub coords: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub agents: Vec<String>,
    pub source_norm: f64,
    pub modes: Vec<EmbeddingModeJson>,
}

impl EmbeddingJson {
    pub fn from_set(set: &EmbeddingSet) -> EmbeddingJson {
        let norm2 = set.source_norm() * set.source_norm();
        EmbeddingJson {
            agents: set.labels().to_vec(),
            source_norm: set.source_norm(),
            modes: set
                .modes()
                .iter()
                .map(|m| EmbeddingModeJson {
                    mode_index: m.mode_index,
                    omega: m.omega,
                    importance: if norm2 > 0.0 {
                        2.0 * m.omega * m.omega / norm2
                    } else {
                        0.0
                    },
                    coords: m.coords().to_vec(),
                })
                .collect(),
        }
    }
}

pub fn embedding_to_json(set: &EmbeddingSet) -> Result<String> {
    Ok(serde_json::to_string_pretty(&EmbeddingJson::from_set(set))?)
}

pub fn read_embedding_json(path: impl AsRef<Path>) -> Result<EmbeddingJson> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// `label,mode,radius,angle` rows, mode-major.
pub fn polar_to_csv(set: &EmbeddingSet) -> String {
    let view = polar(set);
    let mut out = String::from("label,mode,radius,angle\n");
    for mode in &view.modes {
        for (label, (radius, angle)) in set.labels().iter().zip(&mode.points) {
            let _ = writeln!(
                out,
                "{label},{},{},{}",
                mode.mode_index,
                fmt_float(*radius),
                fmt_float(*angle)
            );
        }
    }
    out
}

/// `label,<p0>,...` rows for a population of parameter vectors.
pub fn population_to_csv(labels: &[String], params: &[Vec<f64>]) -> Result<String> {
    if labels.len() != params.len() {
        return Err(Error::LabelCountMismatch {
            expected: params.len(),
            got: labels.len(),
        });
    }
    let width = params.first().map_or(0, |p| p.len());
    let mut out = String::from("label");
    for j in 0..width {
        let _ = write!(out, ",p{j}");
    }
    out.push('\n');
    for (label, row) in labels.iter().zip(params) {
        if row.len() != width {
            return Err(Error::InvalidArgument(
                "population parameter rows must have uniform length".into(),
            ));
        }
        out.push_str(label);
        for v in row {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Reads a population CSV back into labels plus parameter rows.
pub fn parse_population_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty population file".into(),
    })?;
    let width = header.split(',').count().saturating_sub(1);
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let mut fields = line.split(',');
        labels.push(fields.next().unwrap_or_default().to_string());
        let row: Vec<f64> = fields
            .map(|f| {
                f.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("`{f}` is not a float"),
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != width {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {width} parameters, got {}", row.len()),
            });
        }
        rows.push(row);
    }
    Ok((labels, rows))
}

/// `gap,advantage` rows of an attribute profile.
pub fn profile_to_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("gap,advantage\n");
    for (gap, advantage) in samples {
        let _ = writeln!(out, "{},{}", fmt_float(*gap), fmt_float(*advantage));
    }
    out
}
