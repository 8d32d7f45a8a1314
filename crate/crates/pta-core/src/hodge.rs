//! Helmholtz-Hodge split of an evaluation matrix into a ratings-difference
//! (transitive) part and a cyclic residual, plus the intransitivity measure
//! and curl over agent loops.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::EvaluationMatrix;

/// Least-squares ratings, aligned to the matrix labels. For complete
/// round-robins these are the row means of F.
#[derive(Debug, Clone, PartialEq)]
pub struct Ratings {
    values: Vec<f64>,
    labels: Vec<String>,
}

impl Ratings {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }
}

/// F = F_t + F_c with [F_t]_ij = r_i - r_j.
#[derive(Debug, Clone)]
pub struct HodgeParts {
    pub transitive: EvaluationMatrix,
    pub cyclic: EvaluationMatrix,
    pub ratings: Ratings,
}

/// Row means of F. The ratings of a skew-symmetric matrix always sum to zero.
pub fn ratings(f: &EvaluationMatrix) -> Ratings {
    let n = f.n();
    let values = (0..n)
        .map(|i| f.entries().row(i).sum() / n as f64)
        .collect();
    Ratings {
        values,
        labels: f.labels().to_vec(),
    }
}

/// Splits F into transitive and cyclic parts.
pub fn hodge_decompose(f: &EvaluationMatrix) -> HodgeParts {
    let r = ratings(f);
    let n = f.n();
    let transitive_entries = DMatrix::from_fn(n, n, |i, j| r.values[i] - r.values[j]);
    let cyclic_entries = f.entries() - &transitive_entries;
    let tol = f.skew_tolerance();
    let labels = f.labels().to_vec();
    // r_i - r_j negates exactly under (i, j) swap, and subtracting an exactly
    // skew matrix from F cannot worsen its asymmetry, so both parts satisfy
    // the same tolerance F was validated against.
    let transitive = EvaluationMatrix::new(transitive_entries, labels.clone(), tol)
        .expect("ratings difference is exactly skew");
    let cyclic = EvaluationMatrix::new(cyclic_entries, labels, tol)
        .expect("cyclic residual inherits the source tolerance");
    HodgeParts {
        transitive,
        cyclic,
        ratings: r,
    }
}

/// ||F_c|| / ||F_t||, or the purely-cyclic sentinel when the transitive part
/// vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intransitivity {
    Ratio(f64),
    PurelyCyclic,
}

impl Intransitivity {
    pub fn ratio(self) -> Option<f64> {
        match self {
            Intransitivity::Ratio(v) => Some(v),
            Intransitivity::PurelyCyclic => None,
        }
    }

    pub fn is_purely_cyclic(self) -> bool {
        matches!(self, Intransitivity::PurelyCyclic)
    }
}

impl std::fmt::Display for Intransitivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Intransitivity::Ratio(v) => write!(f, "{v}"),
            Intransitivity::PurelyCyclic => write!(f, "purely cyclic"),
        }
    }
}

pub fn intransitivity(f: &EvaluationMatrix) -> Intransitivity {
    let parts = hodge_decompose(f);
    let t = parts.transitive.frobenius_norm();
    if t == 0.0 {
        return Intransitivity::PurelyCyclic;
    }
    Intransitivity::Ratio(parts.cyclic.frobenius_norm() / t)
}

/// Path sum of advantages around an ordered loop of agents (closing the
/// loop); measures cyclicity on that loop.
pub fn curl(f: &EvaluationMatrix, loop_indices: &[usize]) -> Result<f64> {
    if loop_indices.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "curl needs a loop of at least 3 agents, got {}",
            loop_indices.len()
        )));
    }
    let n = f.n();
    for &i in loop_indices {
        if i >= n {
            return Err(Error::IndexOutOfRange {
                what: "matrix",
                index: i,
                size: n,
            });
        }
    }
    let mut total = 0.0;
    for k in 0..loop_indices.len() {
        let i = loop_indices[k];
        let j = loop_indices[(k + 1) % loop_indices.len()];
        total += f.get(i, j);
    }
    Ok(total)
}
