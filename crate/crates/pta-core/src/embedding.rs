//! Scaled disc-game embeddings: per-mode planar coordinates, low-rank
//! reconstruction, importance and complexity of the spectrum, polar views,
//! and in-plane rotation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::EvaluationMatrix;
use crate::schur::SchurForm;

/// Cross product of two planar points; the disc-game evaluation.
pub fn disc(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// One mode's scaled embedding: coords[i] = sqrt(omega) * (q1[i], q2[i]).
#[derive(Debug, Clone)]
pub struct DiscEmbedding {
    pub mode_index: usize,
    pub omega: f64,
    coords: Vec<[f64; 2]>,
}

impl DiscEmbedding {
    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn coord(&self, agent: usize) -> [f64; 2] {
        self.coords[agent]
    }

    /// Advantage of agent i over agent j carried by this mode.
    pub fn advantage(&self, i: usize, j: usize) -> f64 {
        disc(self.coords[i], self.coords[j])
    }
}

/// Ordered collection of disc-game embeddings from one decomposition.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    modes: Vec<DiscEmbedding>,
    labels: Vec<String>,
    source_norm: f64,
}

impl EmbeddingSet {
    pub fn modes(&self) -> &[DiscEmbedding] {
        &self.modes
    }

    pub fn mode(&self, k: usize) -> &DiscEmbedding {
        &self.modes[k]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn agent_count(&self) -> usize {
        self.labels.len()
    }

    pub fn source_norm(&self) -> f64 {
        self.source_norm
    }
}

/// Scales the first `r` Schur planes into disc-game coordinates.
pub fn embed(schur: &SchurForm, r: usize) -> Result<EmbeddingSet> {
    if r > schur.mode_count() {
        return Err(Error::IndexOutOfRange {
            what: "retained modes",
            index: r,
            size: schur.mode_count(),
        });
    }
    let n = schur.labels().len();
    let modes = (0..r)
        .map(|k| {
            let omega = schur.omegas()[k];
            let scale = omega.sqrt();
            let q = schur.basis();
            let coords = (0..n)
                .map(|i| [scale * q[(i, 2 * k)], scale * q[(i, 2 * k + 1)]])
                .collect();
            DiscEmbedding {
                mode_index: k,
                omega,
                coords,
            }
        })
        .collect();
    Ok(EmbeddingSet {
        modes,
        labels: schur.labels().to_vec(),
        source_norm: schur.source_norm(),
    })
}

/// Sums the disc games of all retained modes back into an evaluation matrix;
/// skew-symmetric by construction. An empty set gives the zero matrix.
pub fn reconstruct(set: &EmbeddingSet) -> EvaluationMatrix {
    let n = set.agent_count();
    let mut entries = DMatrix::zeros(n, n);
    for mode in &set.modes {
        for i in 0..n {
            for j in 0..n {
                entries[(i, j)] += mode.advantage(i, j);
            }
        }
    }
    EvaluationMatrix::new(entries, set.labels.to_vec(), 1e-9)
        .expect("sum of cross products is exactly skew")
}

/// omega_k^2 / sum(omega^2): the fraction of ||F||^2 carried by each mode.
pub fn importance(schur: &SchurForm) -> Result<Vec<f64>> {
    let total: f64 = schur.omegas().iter().map(|w| w * w).sum();
    if total == 0.0 {
        return Err(Error::InvalidArgument(
            "importance is undefined for an all-zero spectrum".into(),
        ));
    }
    Ok(schur.omegas().iter().map(|w| w * w / total).collect())
}

/// Relative Frobenius residual left after keeping the first `r` modes,
/// using ||F||^2 for the full spectrum so dropped modes count toward the
/// residual.
pub fn relative_residual(schur: &SchurForm, r: usize) -> f64 {
    let norm2 = schur.source_norm() * schur.source_norm();
    if norm2 == 0.0 {
        return 0.0;
    }
    let kept: f64 = schur.omegas()[..r.min(schur.mode_count())]
        .iter()
        .map(|w| 2.0 * w * w)
        .sum();
    ((norm2 - kept).max(0.0) / norm2).sqrt()
}

/// Fraction of the Frobenius norm captured by the first `r` modes:
/// ||F^(2r)|| / ||F|| = sqrt(1 - residual^2).
pub fn recovery(schur: &SchurForm, r: usize) -> f64 {
    let res = relative_residual(schur, r);
    (1.0 - res * res).max(0.0).sqrt()
}

/// Smallest number of disc games whose reconstruction meets the relative
/// Frobenius error tolerance.
pub fn complexity(schur: &SchurForm, rel_tol: f64) -> Result<usize> {
    if !(0.0 < rel_tol && rel_tol < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol must be in (0, 1), got {rel_tol}"
        )));
    }
    for r in 0..=schur.mode_count() {
        if relative_residual(schur, r) <= rel_tol {
            return Ok(r);
        }
    }
    Ok(schur.mode_count())
}

/// Radius and angle per agent per mode; angle in (-pi, pi], zero points get
/// angle 0 by convention.
#[derive(Debug, Clone)]
pub struct PolarView {
    pub modes: Vec<PolarMode>,
}

#[derive(Debug, Clone)]
pub struct PolarMode {
    pub mode_index: usize,
    /// (radius, angle) per agent, ordered as the matrix labels.
    pub points: Vec<(f64, f64)>,
}

pub fn polar(set: &EmbeddingSet) -> PolarView {
    let modes = set
        .modes
        .iter()
        .map(|mode| PolarMode {
            mode_index: mode.mode_index,
            points: mode
                .coords
                .iter()
                .map(|c| {
                    let r = c[0].hypot(c[1]);
                    let theta = if r == 0.0 { 0.0 } else { c[1].atan2(c[0]) };
                    (r, theta)
                })
                .collect(),
        })
        .collect();
    PolarView { modes }
}

/// Rotates mode `k` by the given angle; pairwise disc values are invariant.
pub fn rotate_mode(set: &EmbeddingSet, k: usize, angle: f64) -> Result<EmbeddingSet> {
    if k >= set.modes.len() {
        return Err(Error::IndexOutOfRange {
            what: "modes",
            index: k,
            size: set.modes.len(),
        });
    }
    let (sin, cos) = angle.sin_cos();
    let mut out = set.clone();
    for c in &mut out.modes[k].coords {
        let [x, y] = *c;
        *c = [cos * x - sin * y, sin * x + cos * y];
    }
    Ok(out)
}
