//! The evaluation-matrix data model: dense skew-symmetric advantage matrices
//! with agent labels, pairwise construction, and permutation views.

use std::collections::{BTreeMap, HashSet};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default skew tolerance for analytically exact evaluators.
pub const EXACT_SKEW_TOL: f64 = 1e-9;
/// Default skew tolerance for fitted or ingested matrices, which carry
/// regression noise.
pub const FITTED_SKEW_TOL: f64 = 1e-6;

/// An agent's position and label within an evaluation matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentId {
    pub index: usize,
    pub label: String,
}

/// Attribute vector plus optional metadata describing one agent.
#[derive(Debug, Clone, Default)]
pub struct AgentPayload {
    pub attributes: Vec<f64>,
    pub metadata: BTreeMap<String, String>,
}

impl AgentPayload {
    pub fn new(attributes: Vec<f64>) -> Self {
        AgentPayload {
            attributes,
            metadata: BTreeMap::new(),
        }
    }
}

/// Checks that every payload in a population carries the same number of
/// attributes.
pub fn validate_payloads(agents: &[AgentPayload]) -> Result<()> {
    let mut lens = agents.iter().map(|a| a.attributes.len());
    if let Some(first) = lens.next() {
        for other in lens {
            if other != first {
                return Err(Error::RaggedAttributes { first, other });
            }
        }
    }
    Ok(())
}

/// Outcome of a skew-symmetry check.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewReport {
    pub max_residual: f64,
    pub worst_pair: (usize, usize),
    pub tolerance: f64,
    pub pass: bool,
}

/// Reports the largest |F[i][j] + F[j][i]| of a square matrix against `tol`.
pub fn validate_skew(entries: &DMatrix<f64>, tol: f64) -> Result<SkewReport> {
    if entries.nrows() != entries.ncols() {
        return Err(Error::NotSquare {
            rows: entries.nrows(),
            cols: entries.ncols(),
        });
    }
    let n = entries.nrows();
    let mut max_residual = 0.0f64;
    let mut worst = (0, 0);
    for i in 0..n {
        for j in (i + 1)..n {
            let r = (entries[(i, j)] + entries[(j, i)]).abs();
            if r > max_residual {
                max_residual = r;
                worst = (i, j);
            }
        }
    }
    Ok(SkewReport {
        max_residual,
        worst_pair: worst,
        tolerance: tol,
        pass: max_residual <= tol,
    })
}

/// Dense N x N skew-symmetric advantage matrix with agent labels.
///
/// Immutable once constructed; construction validates shape, label
/// uniqueness, a zero diagonal, finiteness, and skew-symmetry within
/// `skew_tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationMatrix {
    entries: DMatrix<f64>,
    labels: Vec<String>,
    skew_tolerance: f64,
}

impl EvaluationMatrix {
    pub fn new(mut entries: DMatrix<f64>, labels: Vec<String>, skew_tolerance: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let n = entries.nrows();
        if labels.len() != n {
            return Err(Error::LabelCountMismatch {
                expected: n,
                got: labels.len(),
            });
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !entries[(i, j)].is_finite() {
                    return Err(Error::NonFiniteEvaluation {
                        a: labels[i].clone(),
                        b: labels[j].clone(),
                    });
                }
            }
        }
        for i in 0..n {
            let d = entries[(i, i)];
            if d.abs() > skew_tolerance {
                return Err(Error::NonzeroDiagonal { i, value: d });
            }
            entries[(i, i)] = 0.0;
        }
        let report = validate_skew(&entries, skew_tolerance)?;
        if !report.pass {
            return Err(Error::SkewViolation {
                i: report.worst_pair.0,
                j: report.worst_pair.1,
                residual: report.max_residual,
                tolerance: skew_tolerance,
            });
        }
        Ok(EvaluationMatrix {
            entries,
            labels,
            skew_tolerance,
        })
    }

    /// Builds from explicit rows; convenient in tests and readers.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<String>, skew_tolerance: f64) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        for r in rows {
            if r.len() != cols {
                return Err(Error::NotSquare { rows: n, cols: r.len() });
            }
        }
        let entries = DMatrix::from_fn(n, cols, |i, j| rows[i][j]);
        Self::new(entries, labels, skew_tolerance)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn skew_tolerance(&self) -> f64 {
        self.skew_tolerance
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.labels.iter().enumerate().map(|(index, label)| AgentId {
            index,
            label: label.clone(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn skew_report(&self, tol: f64) -> SkewReport {
        validate_skew(&self.entries, tol).expect("matrix is square by construction")
    }

    /// Applies a permutation to rows, columns, and labels simultaneously;
    /// entry (i, j) of the result is F[perm[i]][perm[j]].
    pub fn reorder(&self, permutation: &[usize]) -> Result<Self> {
        let n = self.n();
        if permutation.len() != n {
            return Err(Error::InvalidPermutation {
                reason: format!("length {} does not match matrix size {}", permutation.len(), n),
            });
        }
        let mut seen = vec![false; n];
        for &p in permutation {
            if p >= n {
                return Err(Error::InvalidPermutation {
                    reason: format!("index {p} out of range for size {n}"),
                });
            }
            if seen[p] {
                return Err(Error::InvalidPermutation {
                    reason: format!("index {p} repeated"),
                });
            }
            seen[p] = true;
        }
        let entries = DMatrix::from_fn(n, n, |i, j| self.entries[(permutation[i], permutation[j])]);
        let labels = permutation.iter().map(|&p| self.labels[p].clone()).collect();
        Ok(EvaluationMatrix {
            entries,
            labels,
            skew_tolerance: self.skew_tolerance,
        })
    }
}

/// Evaluates all agent pairs and assembles the matrix.
///
/// The evaluator must be pure and antisymmetric; the result is validated
/// against `skew_tolerance` and the diagonal is checked and then pinned to
/// exactly zero. Entries are filled in row-major order so results are
/// deterministic given the agent order.
pub fn build_matrix<A>(
    labels: Vec<String>,
    agents: &[A],
    skew_tolerance: f64,
    evaluator: impl Fn(&A, &A) -> f64,
) -> Result<EvaluationMatrix> {
    if agents.is_empty() {
        return Err(Error::InvalidArgument("agents must be nonempty".into()));
    }
    if labels.len() != agents.len() {
        return Err(Error::LabelCountMismatch {
            expected: agents.len(),
            got: labels.len(),
        });
    }
    let n = agents.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = evaluator(&agents[i], &agents[j]);
            if !v.is_finite() {
                return Err(Error::NonFiniteEvaluation {
                    a: labels[i].clone(),
                    b: labels[j].clone(),
                });
            }
            entries[(i, j)] = v;
        }
    }
    EvaluationMatrix::new(entries, labels, skew_tolerance)
}

/// Convenience for build_matrix over attribute payloads; also enforces the
/// uniform-attribute-length invariant.
pub fn build_matrix_from_payloads(
    labels: Vec<String>,
    agents: &[AgentPayload],
    skew_tolerance: f64,
    evaluator: impl Fn(&AgentPayload, &AgentPayload) -> f64,
) -> Result<EvaluationMatrix> {
    validate_payloads(agents)?;
    build_matrix(labels, agents, skew_tolerance, evaluator)
}

/// "a0", "a1", ... fallback labels.
pub fn default_labels(n: usize) -> Vec<String> {
    let width = if n <= 1 { 1 } else { (n - 1).to_string().len() };
    (0..n).map(|i| format!("a{i:0width$}")).collect()
}
