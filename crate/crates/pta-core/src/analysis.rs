//! Interpretation of embeddings: linear policy-to-plane fits with
//! sparsest-basis rotation, coarse-grained cluster matrices,
//! attribute-ordered Toeplitz profiles, and the importance/complexity report.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::embedding::{DiscEmbedding, EmbeddingSet};
use crate::error::{Error, Result};
use crate::matrix::EvaluationMatrix;
use crate::schur::SchurForm;

/// Least-squares map from agent parameters to one plane's coordinates.
#[derive(Debug, Clone)]
pub struct ModeFit {
    pub mode_index: usize,
    /// 2 x T weights: row 0 feeds the first plane axis, row 1 the second.
    pub weights: [Vec<f64>; 2],
    pub intercept: [f64; 2],
    /// Relative RMS error of the prediction against the centered embedding.
    pub residual: f64,
}

impl ModeFit {
    pub fn predict(&self, params: &[f64]) -> [f64; 2] {
        let mut out = self.intercept;
        for axis in 0..2 {
            for (w, p) in self.weights[axis].iter().zip(params) {
                out[axis] += w * p;
            }
        }
        out
    }

    pub fn weight_l1(&self) -> f64 {
        self.weights
            .iter()
            .flat_map(|row| row.iter())
            .map(|w| w.abs())
            .sum()
    }
}

/// Linear fits for a selection of modes.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub modes: Vec<ModeFit>,
    pub param_count: usize,
}

impl LinearFit {
    pub fn mode(&self, mode_index: usize) -> Option<&ModeFit> {
        self.modes.iter().find(|m| m.mode_index == mode_index)
    }
}

/// Ordinary least squares of each plane axis on the agent parameters (with
/// intercept). `params` is N x T, rows aligned with the embedding's agents.
pub fn fit_linear_map(
    params: &DMatrix<f64>,
    set: &EmbeddingSet,
    modes: &[usize],
) -> Result<LinearFit> {
    let n = set.agent_count();
    let t = params.ncols();
    if params.nrows() != n {
        return Err(Error::InvalidArgument(format!(
            "parameter rows {} do not match agent count {n}",
            params.nrows()
        )));
    }
    if n <= t + 1 {
        return Err(Error::InvalidArgument(format!(
            "need more agents than parameters plus intercept ({n} <= {})",
            t + 1
        )));
    }
    for &k in modes {
        if k >= set.modes().len() {
            return Err(Error::IndexOutOfRange {
                what: "modes",
                index: k,
                size: set.modes().len(),
            });
        }
    }

    // design matrix [params | 1]
    let design = DMatrix::from_fn(n, t + 1, |i, j| if j < t { params[(i, j)] } else { 1.0 });
    let svd = design.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let rank_tol = sigma_max * (n.max(t + 1) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|s| **s > rank_tol).count();
    if rank < t + 1 {
        return Err(Error::RankDeficient { rank, cols: t + 1 });
    }

    let mut fits = Vec::with_capacity(modes.len());
    for &k in modes {
        let mode = set.mode(k);
        let mut weights = [vec![0.0; t], vec![0.0; t]];
        let mut intercept = [0.0; 2];
        let mut sse = 0.0;
        let mut centered = 0.0;
        for axis in 0..2 {
            let target = DVector::from_fn(n, |i, _| mode.coord(i)[axis]);
            let beta = svd
                .solve(&target, rank_tol)
                .map_err(|e| Error::Numeric(format!("least squares solve failed: {e}")))?;
            for j in 0..t {
                weights[axis][j] = beta[j];
            }
            intercept[axis] = beta[t];
            let prediction = &design * &beta;
            let mean = target.mean();
            sse += (&target - &prediction).norm_squared();
            centered += target.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        }
        let residual = if centered > 0.0 {
            (sse / centered).sqrt()
        } else if sse > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        fits.push(ModeFit {
            mode_index: k,
            weights,
            intercept,
            residual,
        });
    }
    Ok(LinearFit {
        modes: fits,
        param_count: t,
    })
}

/// Rotates one mode's fitted weights in-plane to minimize their L1 norm,
/// searching [0, 180) degrees at 0.1-degree resolution (ties keep the
/// smaller angle). Returns the rotated fit and the angle in radians.
///
/// Pairwise disc values are invariant under any in-plane rotation, so this
/// only changes the basis in which the trade-off directions are read.
pub fn sparsest_rotation(fit: &LinearFit, mode_index: usize) -> Result<(LinearFit, f64)> {
    let position = fit
        .modes
        .iter()
        .position(|m| m.mode_index == mode_index)
        .ok_or(Error::IndexOutOfRange {
            what: "fitted modes",
            index: mode_index,
            size: fit.modes.len(),
        })?;
    let target = &fit.modes[position];

    let mut best_angle = 0.0f64;
    let mut best_l1 = f64::INFINITY;
    for step in 0..1800 {
        let angle = (step as f64) * 0.1f64.to_radians();
        let l1 = rotated_l1(target, angle);
        if l1 < best_l1 - 1e-15 {
            best_l1 = l1;
            best_angle = angle;
        }
    }

    let mut out = fit.clone();
    out.modes[position] = rotate_fit(target, best_angle);
    Ok((out, best_angle))
}

fn rotate_fit(fit: &ModeFit, angle: f64) -> ModeFit {
    let (sin, cos) = angle.sin_cos();
    let t = fit.weights[0].len();
    let mut weights = [vec![0.0; t], vec![0.0; t]];
    for j in 0..t {
        let x = fit.weights[0][j];
        let y = fit.weights[1][j];
        weights[0][j] = cos * x - sin * y;
        weights[1][j] = sin * x + cos * y;
    }
    let intercept = [
        cos * fit.intercept[0] - sin * fit.intercept[1],
        sin * fit.intercept[0] + cos * fit.intercept[1],
    ];
    ModeFit {
        mode_index: fit.mode_index,
        weights,
        intercept,
        residual: fit.residual,
    }
}

fn rotated_l1(fit: &ModeFit, angle: f64) -> f64 {
    let (sin, cos) = angle.sin_cos();
    let mut total = 0.0;
    for j in 0..fit.weights[0].len() {
        let x = fit.weights[0][j];
        let y = fit.weights[1][j];
        total += (cos * x - sin * y).abs() + (sin * x + cos * y).abs();
    }
    total
}

/// Group-averaged advantage matrix.
#[derive(Debug, Clone)]
pub struct ClusterSummary {
    pub groups: Vec<String>,
    pub sizes: Vec<usize>,
    /// G x G mean advantage; diagonal blocks exclude self-pairs.
    pub matrix: DMatrix<f64>,
}

/// F_hat[g][h] = mean advantage of group g agents over group h agents.
/// Groups are ordered clockwise by mean embedding angle when an embedding is
/// supplied, alphabetically otherwise.
pub fn coarse_grain(
    f: &EvaluationMatrix,
    assignment: &BTreeMap<String, String>,
    order_by: Option<&DiscEmbedding>,
) -> Result<ClusterSummary> {
    let n = f.n();
    let mut group_names: Vec<String> = Vec::new();
    let mut member_group = Vec::with_capacity(n);
    for label in f.labels() {
        let group = assignment.get(label).ok_or_else(|| Error::MissingLabel {
            label: label.clone(),
            what: "group assignment".into(),
        })?;
        let gid = match group_names.iter().position(|g| g == group) {
            Some(gid) => gid,
            None => {
                group_names.push(group.clone());
                group_names.len() - 1
            }
        };
        member_group.push(gid);
    }
    let g = group_names.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); g];
    for (i, &gid) in member_group.iter().enumerate() {
        members[gid].push(i);
    }

    // order groups
    let mut order: Vec<usize> = (0..g).collect();
    match order_by {
        Some(embedding) => {
            let mean_angle: Vec<f64> = members
                .iter()
                .map(|idx| {
                    let (mut sx, mut sy) = (0.0, 0.0);
                    for &i in idx {
                        let c = embedding.coord(i);
                        sx += c[0];
                        sy += c[1];
                    }
                    sy.atan2(sx)
                })
                .collect();
            // clockwise from the largest angle
            order.sort_by(|&a, &b| {
                mean_angle[b]
                    .partial_cmp(&mean_angle[a])
                    .unwrap()
                    .then_with(|| group_names[a].cmp(&group_names[b]))
            });
        }
        None => order.sort_by(|&a, &b| group_names[a].cmp(&group_names[b])),
    }

    let mut matrix = DMatrix::zeros(g, g);
    for (row, &ga) in order.iter().enumerate() {
        for (col, &gb) in order.iter().enumerate() {
            let mut total = 0.0;
            let mut count = 0usize;
            for &i in &members[ga] {
                for &j in &members[gb] {
                    if i == j {
                        continue;
                    }
                    total += f.get(i, j);
                    count += 1;
                }
            }
            matrix[(row, col)] = if count > 0 { total / count as f64 } else { 0.0 };
        }
    }

    Ok(ClusterSummary {
        groups: order.iter().map(|&gid| group_names[gid].clone()).collect(),
        sizes: order.iter().map(|&gid| members[gid].len()).collect(),
        matrix,
    })
}

/// Matrix reordered by an attribute with the cross-diagonal advantage
/// profile and a Toeplitz deviation score.
#[derive(Debug, Clone)]
pub struct AttributeProfile {
    pub attribute: String,
    pub order: Vec<usize>,
    pub reordered: EvaluationMatrix,
    /// (attribute gap, advantage) along the anti-diagonal through the matrix
    /// center, sorted by gap.
    pub samples: Vec<(f64, f64)>,
    /// Pooled within-diagonal standard deviation over the overall RMS; zero
    /// for exactly Toeplitz matrices, near one for unstructured ones.
    pub toeplitz_deviation: f64,
    /// Number of adjacent pairs whose attribute values tied (broken by label).
    pub tie_count: usize,
}

/// Reorders F by ascending attribute (ties broken by label, reported via
/// `tie_count`) and profiles how close the result is to Toeplitz.
pub fn attribute_order_profile(
    f: &EvaluationMatrix,
    attribute: &str,
    values: &[f64],
) -> Result<AttributeProfile> {
    let n = f.n();
    if values.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} attribute values, got {}",
            values.len()
        )));
    }
    let labels = f.labels();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .partial_cmp(&values[j])
            .unwrap()
            .then_with(|| labels[i].cmp(&labels[j]))
    });
    let tie_count = order
        .windows(2)
        .filter(|w| values[w[0]] == values[w[1]])
        .count();
    let reordered = f.reorder(&order)?;
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();

    let mut samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let j = n - 1 - i;
            (sorted_values[j] - sorted_values[i], reordered.get(i, j))
        })
        .collect();
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    Ok(AttributeProfile {
        attribute: attribute.to_string(),
        order,
        toeplitz_deviation: toeplitz_deviation(&reordered),
        reordered,
        samples,
        tie_count,
    })
}

/// Pooled per-diagonal variance (weighted by diagonal length) over the mean
/// square of all entries.
fn toeplitz_deviation(f: &EvaluationMatrix) -> f64 {
    let n = f.n() as i64;
    let mut pooled = 0.0;
    let mut weight = 0usize;
    for d in -(n - 1)..=(n - 1) {
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut count = 0usize;
        for i in 0..n {
            let j = i - d;
            if j < 0 || j >= n {
                continue;
            }
            let v = f.get(i as usize, j as usize);
            sum += v;
            sum2 += v * v;
            count += 1;
        }
        let mean = sum / count as f64;
        pooled += sum2 - count as f64 * mean * mean;
        weight += count;
    }
    let overall_ms = f.entries().iter().map(|v| v * v).sum::<f64>() / (n * n) as f64;
    if overall_ms == 0.0 {
        return 0.0;
    }
    (pooled / weight as f64 / overall_ms).max(0.0).sqrt()
}

/// One row of the spectrum report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ModeReport {
    pub mode: usize,
    pub omega: f64,
    pub importance: f64,
    /// ||F^(2r)||_F / ||F||_F after keeping modes 1..=r.
    pub cumulative_recovery: f64,
    pub degeneracy_group: usize,
}

/// Importance table plus complexity per requested tolerance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Report {
    pub modes: Vec<ModeReport>,
    /// (relative Frobenius tolerance, smallest sufficient mode count).
    pub complexity: Vec<(f64, usize)>,
}

pub fn report(schur: &SchurForm, tolerances: &[f64]) -> Result<Report> {
    let importance = crate::embedding::importance(schur)?;
    let modes = (0..schur.mode_count())
        .map(|k| ModeReport {
            mode: k,
            omega: schur.omegas()[k],
            importance: importance[k],
            cumulative_recovery: crate::embedding::recovery(schur, k + 1),
            degeneracy_group: schur.group_of(k),
        })
        .collect();
    let complexity = tolerances
        .iter()
        .map(|&tol| Ok((tol, crate::embedding::complexity(schur, tol)?)))
        .collect::<Result<_>>()?;
    Ok(Report { modes, complexity })
}
