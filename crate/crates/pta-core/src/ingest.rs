//! Outcome-log ingestion: pairwise win/loss records to complete
//! win-probability matrices and logit-link evaluation matrices, plus agent
//! attribute tables for downstream analysis.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{EvaluationMatrix, FITTED_SKEW_TOL};

/// Probabilities are clamped into [EPS, 1 - EPS] before the logit so
/// undefeated agents produce large finite advantages instead of infinities.
pub const LOGIT_CLAMP: f64 = 1e-6;
/// Default ridge penalty on latent strengths.
pub const DEFAULT_REGULARIZATION: f64 = 0.05;

/// Aggregated head-to-head counts for one ordered pair of agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeRecord {
    pub agent_a: String,
    pub agent_b: String,
    pub wins_a: u64,
    pub wins_b: u64,
}

/// A merged log of pairwise outcomes. Duplicate (a, b) rows are summed and
/// (b, a) rows folded into the first-seen orientation with counts swapped.
#[derive(Debug, Clone, Default)]
pub struct OutcomeLog {
    records: Vec<OutcomeRecord>,
    labels: Vec<String>,
}

impl OutcomeLog {
    pub fn from_records<I>(rows: I) -> Result<OutcomeLog>
    where
        I: IntoIterator<Item = OutcomeRecord>,
    {
        let mut log = OutcomeLog::default();
        let mut label_index: HashMap<String, usize> = HashMap::new();
        let mut pair_index: HashMap<(usize, usize), usize> = HashMap::new();
        for (line, row) in rows.into_iter().enumerate() {
            if row.wins_a == 0 && row.wins_b == 0 {
                return Err(Error::Parse {
                    line: line + 2, // header is line 1
                    message: format!(
                        "record ({}, {}) has no observed games",
                        row.agent_a, row.agent_b
                    ),
                });
            }
            if row.agent_a == row.agent_b {
                return Err(Error::Parse {
                    line: line + 2,
                    message: format!("agent `{}` cannot play itself", row.agent_a),
                });
            }
            let mut intern = |label: &str, log: &mut OutcomeLog| -> usize {
                *label_index.entry(label.to_string()).or_insert_with(|| {
                    log.labels.push(label.to_string());
                    log.labels.len() - 1
                })
            };
            let ia = intern(&row.agent_a, &mut log);
            let ib = intern(&row.agent_b, &mut log);
            let key = (ia.min(ib), ia.max(ib));
            match pair_index.get(&key) {
                Some(&slot) => {
                    let existing = &mut log.records[slot];
                    if existing.agent_a == row.agent_a {
                        existing.wins_a += row.wins_a;
                        existing.wins_b += row.wins_b;
                    } else {
                        existing.wins_a += row.wins_b;
                        existing.wins_b += row.wins_a;
                    }
                }
                None => {
                    pair_index.insert(key, log.records.len());
                    log.records.push(row);
                }
            }
        }
        Ok(log)
    }

    pub fn records(&self) -> &[OutcomeRecord] {
        &self.records
    }

    /// Agent labels in first-appearance order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn label_indices(&self) -> HashMap<&str, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect()
    }

    /// Errors with the component partition when the comparison graph is
    /// disconnected.
    pub fn check_connected(&self) -> Result<()> {
        let n = self.labels.len();
        if n == 0 {
            return Ok(());
        }
        let index = self.label_indices();
        let mut adjacency = vec![Vec::new(); n];
        for r in &self.records {
            let a = index[r.agent_a.as_str()];
            let b = index[r.agent_b.as_str()];
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut component = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            component[start] = count;
            while let Some(v) = stack.pop() {
                for &w in &adjacency[v] {
                    if component[w] == usize::MAX {
                        component[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        if count > 1 {
            let mut components = vec![Vec::new(); count];
            for (i, &c) in component.iter().enumerate() {
                components[c].push(self.labels[i].clone());
            }
            return Err(Error::DisconnectedGraph { components });
        }
        Ok(())
    }
}

/// Reads an outcomes CSV with header `agent_a,agent_b,wins_a,wins_b`.
pub fn load_outcomes(path: impl AsRef<Path>) -> Result<OutcomeLog> {
    let file = std::fs::File::open(path)?;
    read_outcomes(file)
}

pub fn read_outcomes(reader: impl Read) -> Result<OutcomeLog> {
    let mut csv_reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    {
        let headers = csv_reader.headers()?;
        let expect = ["agent_a", "agent_b", "wins_a", "wins_b"];
        let got: Vec<&str> = headers.iter().collect();
        if got != expect {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header {expect:?}, got {got:?}"),
            });
        }
    }
    let mut rows = Vec::new();
    for (i, record) in csv_reader.records().enumerate() {
        let line = i + 2;
        let record = record?;
        if record.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields, got {}", record.len()),
            });
        }
        let parse_count = |field: &str, name: &str| -> Result<u64> {
            let value: i64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("{name} `{field}` is not an integer"),
            })?;
            u64::try_from(value).map_err(|_| Error::Parse {
                line,
                message: format!("{name} must be nonnegative, got {value}"),
            })
        };
        rows.push(OutcomeRecord {
            agent_a: record[0].to_string(),
            agent_b: record[1].to_string(),
            wins_a: parse_count(&record[2], "wins_a")?,
            wins_b: parse_count(&record[3], "wins_b")?,
        });
    }
    OutcomeLog::from_records(rows)
}

/// Latent strengths from the ridge-penalized logistic fit, mean-centered;
/// aligned to the log's label order.
#[derive(Debug, Clone)]
pub struct Strengths {
    values: Vec<f64>,
    labels: Vec<String>,
}

impl Strengths {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Maximizes the penalized Bernoulli likelihood with p_ij = sigmoid(s_i - s_j)
/// and ridge penalty `regularization * sum s_i^2` by Newton iteration;
/// converges when the gradient max-norm drops below 1e-8.
pub fn fit_strengths(log: &OutcomeLog, regularization: f64) -> Result<Strengths> {
    if regularization <= 0.0 || !regularization.is_finite() {
        return Err(Error::InvalidArgument(
            "regularization must be positive".into(),
        ));
    }
    if log.labels.is_empty() {
        return Err(Error::InvalidArgument("outcome log is empty".into()));
    }
    log.check_connected()?;
    let n = log.labels.len();
    let index = log.label_indices();
    let pairs: Vec<(usize, usize, f64, f64)> = log
        .records
        .iter()
        .map(|r| {
            (
                index[r.agent_a.as_str()],
                index[r.agent_b.as_str()],
                r.wins_a as f64,
                r.wins_b as f64,
            )
        })
        .collect();

    let mut s: DVector<f64> = DVector::zeros(n);
    const GRAD_TOL: f64 = 1e-8;
    const MAX_ITER: usize = 200;
    for _ in 0..MAX_ITER {
        let mut grad: DVector<f64> = DVector::zeros(n);
        let mut hessian: DMatrix<f64> = DMatrix::zeros(n, n);
        for &(a, b, wa, wb) in &pairs {
            let p = sigmoid(s[a] - s[b]);
            let g = wa * (1.0 - p) - wb * p;
            grad[a] += g;
            grad[b] -= g;
            let weight = (wa + wb) * p * (1.0 - p);
            hessian[(a, a)] += weight;
            hessian[(b, b)] += weight;
            hessian[(a, b)] -= weight;
            hessian[(b, a)] -= weight;
        }
        for i in 0..n {
            grad[i] -= 2.0 * regularization * s[i];
            hessian[(i, i)] += 2.0 * regularization;
        }
        if grad.amax() <= GRAD_TOL {
            let mean = s.mean();
            let values = s.iter().map(|v| v - mean).collect();
            return Ok(Strengths {
                values,
                labels: log.labels.clone(),
            });
        }
        let delta = hessian
            .cholesky()
            .ok_or_else(|| Error::Numeric("strength fit Hessian is not positive definite".into()))?
            .solve(&grad);
        s += delta;
    }
    Err(Error::Numeric(format!(
        "strength fit did not converge within {MAX_ITER} Newton iterations"
    )))
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// N x N win probabilities, diagonal 0.5, complement identity exact by
/// construction (the lower triangle stores 1 minus the upper).
#[derive(Debug, Clone)]
pub struct WinProbMatrix {
    probs: DMatrix<f64>,
    labels: Vec<String>,
}

impl WinProbMatrix {
    pub fn n(&self) -> usize {
        self.probs.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[(i, j)]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &DMatrix<f64> {
        &self.probs
    }

    fn from_upper(
        labels: Vec<String>,
        upper: impl Fn(usize, usize) -> f64,
    ) -> WinProbMatrix {
        let n = labels.len();
        let mut probs = DMatrix::from_element(n, n, 0.5);
        for i in 0..n {
            for j in (i + 1)..n {
                let p = upper(i, j);
                probs[(i, j)] = p;
                probs[(j, i)] = 1.0 - p;
            }
        }
        WinProbMatrix { probs, labels }
    }
}

/// Win probabilities for every pair from the fitted strengths alone; the
/// result is purely transitive by construction.
pub fn estimate_probs(log: &OutcomeLog, regularization: f64) -> Result<WinProbMatrix> {
    let strengths = fit_strengths(log, regularization)?;
    let s = strengths.values();
    Ok(WinProbMatrix::from_upper(
        strengths.labels().to_vec(),
        |i, j| sigmoid(s[i] - s[j]),
    ))
}

/// Win probabilities preserving observed structure: observed pairs use
/// Beta(1,1)-smoothed empirical frequencies, missing pairs are completed
/// from the fitted strengths. Cyclic structure in the data survives this
/// path; `estimate_probs` flattens it.
pub fn complete_probs(log: &OutcomeLog, regularization: f64) -> Result<WinProbMatrix> {
    let strengths = fit_strengths(log, regularization)?;
    let s = strengths.values();
    let index: HashMap<&str, usize> = strengths
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let mut observed: HashMap<(usize, usize), f64> = HashMap::new();
    for r in log.records() {
        let a = index[r.agent_a.as_str()];
        let b = index[r.agent_b.as_str()];
        let p_a = (r.wins_a as f64 + 1.0) / ((r.wins_a + r.wins_b) as f64 + 2.0);
        if a < b {
            observed.insert((a, b), p_a);
        } else {
            observed.insert((b, a), 1.0 - p_a);
        }
    }
    Ok(WinProbMatrix::from_upper(
        strengths.labels().to_vec(),
        |i, j| match observed.get(&(i, j)) {
            Some(&p) => p,
            None => sigmoid(s[i] - s[j]),
        },
    ))
}

/// Logit-link evaluation matrix plus the number of probabilities clamped
/// away from {0, 1} before taking the log.
#[derive(Debug, Clone)]
pub struct LogitLink {
    pub matrix: EvaluationMatrix,
    pub clamped_pairs: usize,
}

/// f_ij = log(p_ij / (1 - p_ij)) computed on the upper triangle and mirrored,
/// so the output is exactly skew-symmetric.
pub fn logit_link(p: &WinProbMatrix) -> LogitLink {
    let n = p.n();
    let mut entries = DMatrix::zeros(n, n);
    let mut clamped_pairs = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let raw = p.get(i, j);
            let clamped = raw.clamp(LOGIT_CLAMP, 1.0 - LOGIT_CLAMP);
            if clamped != raw {
                clamped_pairs += 1;
            }
            let logit = (clamped / (1.0 - clamped)).ln();
            entries[(i, j)] = logit;
            entries[(j, i)] = -logit;
        }
    }
    let matrix = EvaluationMatrix::new(entries, p.labels().to_vec(), FITTED_SKEW_TOL)
        .expect("mirrored logits are exactly skew");
    LogitLink {
        matrix,
        clamped_pairs,
    }
}

/// One attribute value: numeric, free text, or missing (empty cell).
#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Number(f64),
    Text(String),
    Missing,
}

/// Per-label attribute map loaded from a CSV with a `label` column. A column
/// is numeric when every non-empty cell parses as a float.
#[derive(Debug, Clone)]
pub struct AttributeTable {
    labels: Vec<String>,
    columns: Vec<String>,
    rows: HashMap<String, Vec<AttrValue>>,
}

impl AttributeTable {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn get(&self, label: &str, column: &str) -> Option<&AttrValue> {
        let col = self.columns.iter().position(|c| c == column)?;
        self.rows.get(label).map(|r| &r[col])
    }

    pub fn is_numeric(&self, column: &str) -> bool {
        let Some(col) = self.columns.iter().position(|c| c == column) else {
            return false;
        };
        let mut any = false;
        for row in self.rows.values() {
            match &row[col] {
                AttrValue::Number(_) => any = true,
                AttrValue::Missing => {}
                AttrValue::Text(_) => return false,
            }
        }
        any
    }

    /// Numeric attribute values for the given labels, erroring on the first
    /// label missing from the table or missing the value.
    pub fn numeric_for(&self, labels: &[String], column: &str) -> Result<Vec<f64>> {
        if !self.is_numeric(column) {
            return Err(Error::MissingAttribute(column.to_string()));
        }
        labels
            .iter()
            .map(|label| match self.get(label, column) {
                Some(AttrValue::Number(v)) => Ok(*v),
                Some(_) => Err(Error::MissingLabel {
                    label: label.clone(),
                    what: format!("numeric attribute `{column}`"),
                }),
                None => Err(Error::MissingLabel {
                    label: label.clone(),
                    what: "attribute table".into(),
                }),
            })
            .collect()
    }

    /// Text attribute per label (numbers rendered back to text), for grouping.
    pub fn text_for(&self, labels: &[String], column: &str) -> Result<Vec<String>> {
        if !self.columns.iter().any(|c| c == column) {
            return Err(Error::MissingAttribute(column.to_string()));
        }
        labels
            .iter()
            .map(|label| match self.get(label, column) {
                Some(AttrValue::Text(t)) => Ok(t.clone()),
                Some(AttrValue::Number(v)) => Ok(v.to_string()),
                Some(AttrValue::Missing) => Err(Error::MissingLabel {
                    label: label.clone(),
                    what: format!("attribute `{column}`"),
                }),
                None => Err(Error::MissingLabel {
                    label: label.clone(),
                    what: "attribute table".into(),
                }),
            })
            .collect()
    }
}

/// Loads a CSV with a `label` column plus arbitrary attribute columns.
pub fn load_attributes(path: impl AsRef<Path>) -> Result<AttributeTable> {
    let file = std::fs::File::open(path)?;
    read_attributes(file)
}

pub fn read_attributes(reader: impl Read) -> Result<AttributeTable> {
    let mut csv_reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = csv_reader.headers()?.iter().map(String::from).collect();
    let label_col = headers
        .iter()
        .position(|h| h == "label")
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "attribute CSV needs a `label` column".into(),
        })?;
    let columns: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_col)
        .map(|(_, h)| h.clone())
        .collect();

    let mut labels = Vec::new();
    let mut raw_rows: Vec<(String, Vec<String>)> = Vec::new();
    for (i, record) in csv_reader.records().enumerate() {
        let line = i + 2;
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, got {}", headers.len(), record.len()),
            });
        }
        let label = record[label_col].to_string();
        if labels.contains(&label) {
            return Err(Error::DuplicateLabel { label });
        }
        let values = record
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != label_col)
            .map(|(_, v)| v.to_string())
            .collect();
        labels.push(label.clone());
        raw_rows.push((label, values));
    }

    // a column is numeric iff every non-empty cell parses
    let numeric: Vec<bool> = (0..columns.len())
        .map(|c| {
            let mut any = false;
            for (_, values) in &raw_rows {
                let v = &values[c];
                if v.is_empty() {
                    continue;
                }
                if v.parse::<f64>().is_ok() {
                    any = true;
                } else {
                    return false;
                }
            }
            any
        })
        .collect();

    let rows = raw_rows
        .into_iter()
        .map(|(label, values)| {
            let parsed = values
                .into_iter()
                .enumerate()
                .map(|(c, v)| {
                    if v.is_empty() {
                        AttrValue::Missing
                    } else if numeric[c] {
                        AttrValue::Number(v.parse().expect("checked numeric"))
                    } else {
                        AttrValue::Text(v)
                    }
                })
                .collect();
            (label, parsed)
        })
        .collect();

    Ok(AttributeTable {
        labels,
        columns,
        rows,
    })
}
