//! Real Schur form of skew-symmetric matrices.
//!
//! A skew-symmetric F factors as Q U Q^T with Q orthonormal and U block
//! diagonal with 2x2 blocks omega_k * R, R the ninety-degree rotation. The
//! blocks are recovered from the spectral decomposition of the symmetric
//! positive semidefinite matrix M = A A^T = -A^2: eigenvectors of M spanning
//! an eigenvalue cluster form an invariant subspace of A, inside which A acts
//! as a direct sum of scaled rotations. Each omega_k is read off from the
//! action of A itself (not from sqrt of M's eigenvalues), which keeps small
//! singular values at full absolute accuracy and lets near-null directions be
//! dropped cleanly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::EvaluationMatrix;

/// Default relative cutoff below which modes are treated as numerical noise.
pub const DEFAULT_RANK_CUTOFF: f64 = 1e-10;
/// Default relative tolerance for reporting two modes as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-6;

/// Tuning knobs for `schur_skew`.
#[derive(Debug, Clone, Copy)]
pub struct SchurOptions {
    /// Modes with omega below `rank_cutoff * omega_1` are dropped.
    pub rank_cutoff: f64,
    /// Modes whose omegas agree within this relative tolerance share a
    /// degeneracy group.
    pub degeneracy_tol: f64,
}

impl Default for SchurOptions {
    fn default() -> Self {
        SchurOptions {
            rank_cutoff: DEFAULT_RANK_CUTOFF,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        }
    }
}

/// Orthonormal basis Q (N x 2m), the nonincreasing eigenvalue magnitudes
/// omega_k, and the degeneracy structure of the spectrum.
#[derive(Debug, Clone)]
pub struct SchurForm {
    basis: DMatrix<f64>,
    omegas: Vec<f64>,
    degeneracy_groups: Vec<Vec<usize>>,
    labels: Vec<String>,
    source_norm: f64,
}

impl SchurForm {
    pub fn mode_count(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// N x 2m orthonormal basis; columns 2k, 2k+1 span the k-th plane.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// The pair of basis columns spanning mode `k`.
    pub fn plane(&self, k: usize) -> (DVector<f64>, DVector<f64>) {
        (
            self.basis.column(2 * k).into_owned(),
            self.basis.column(2 * k + 1).into_owned(),
        )
    }

    /// Partition of mode indices by shared eigenvalue.
    pub fn degeneracy_groups(&self) -> &[Vec<usize>] {
        &self.degeneracy_groups
    }

    /// Group id of a mode (its position in `degeneracy_groups`).
    pub fn group_of(&self, mode: usize) -> usize {
        self.degeneracy_groups
            .iter()
            .position(|g| g.contains(&mode))
            .expect("every mode belongs to a group")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Frobenius norm of the decomposed matrix.
    pub fn source_norm(&self) -> f64 {
        self.source_norm
    }

    /// Q U Q^T restricted to the first `r` modes (all modes if `r` exceeds
    /// the retained count).
    pub fn reconstruction(&self, r: usize) -> DMatrix<f64> {
        let n = self.basis.nrows();
        let mut out = DMatrix::zeros(n, n);
        for k in 0..r.min(self.mode_count()) {
            let q1 = self.basis.column(2 * k);
            let q2 = self.basis.column(2 * k + 1);
            let w = self.omegas[k];
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += w * (q1[i] * q2[j] - q2[i] * q1[j]);
                }
            }
        }
        out
    }
}

/// Computes the real Schur form of a validated skew-symmetric matrix.
///
/// Deterministic given F: within each plane the basis is rotated so the
/// first agent with nonzero radius lies on the nonnegative first axis, and
/// orientation (advantage flowing clockwise) is fixed by construction from
/// the action of F.
pub fn schur_skew(f: &EvaluationMatrix, options: SchurOptions) -> Result<SchurForm> {
    if options.rank_cutoff < 0.0 {
        return Err(Error::InvalidArgument("rank_cutoff must be nonnegative".into()));
    }
    let n = f.n();
    let source_norm = f.frobenius_norm();
    // exact skew-symmetrization absorbs the asymmetry the matrix tolerance allowed
    let a = (f.entries() - f.entries().transpose()) * 0.5;

    if n < 2 || source_norm == 0.0 {
        return Ok(SchurForm {
            basis: DMatrix::zeros(n, 0),
            omegas: Vec::new(),
            degeneracy_groups: Vec::new(),
            labels: f.labels().to_vec(),
            source_norm,
        });
    }

    let m = &a * a.transpose();
    let eigen = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 200 * n).ok_or_else(|| {
        Error::Numeric(format!(
            "symmetric eigensolver did not converge on the {n}x{n} squared matrix"
        ))
    })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eigen.eigenvalues[j]
            .partial_cmp(&eigen.eigenvalues[i])
            .expect("eigenvalues are finite")
    });
    let lambda_max = eigen.eigenvalues[order[0]].max(0.0);
    let omega_max = lambda_max.sqrt();
    let cutoff = options.rank_cutoff * omega_max;

    // Cluster eigenvalues of M so that exactly-degenerate eigenvalues (pairs
    // from the skew structure, multiplets from game symmetries) are
    // processed as one invariant subspace.
    let cluster_gap = |lam: f64| 1e-10 * lambda_max + 1e-8 * lam.abs();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some(cluster) => {
                let prev = eigen.eigenvalues[*cluster.last().unwrap()];
                if prev - eigen.eigenvalues[idx] <= cluster_gap(prev) {
                    cluster.push(idx);
                } else {
                    clusters.push(vec![idx]);
                }
            }
            None => clusters.push(vec![idx]),
        }
    }

    struct Plane {
        q1: DVector<f64>,
        q2: DVector<f64>,
        omega: f64,
    }
    let mut planes: Vec<Plane> = Vec::new();

    for cluster in clusters {
        let mut pending: Vec<DVector<f64>> = cluster
            .iter()
            .map(|&idx| eigen.eigenvectors.column(idx).into_owned())
            .collect();
        let mut accepted: Vec<DVector<f64>> = Vec::new();

        while let Some(mut u) = pending.pop() {
            // re-orthonormalize against planes already taken from this cluster
            for q in &accepted {
                let c = u.dot(q);
                u -= q * c;
            }
            let norm = u.norm();
            if norm < 0.5 {
                // direction already absorbed by an extracted plane
                continue;
            }
            u /= norm;

            let mut v = &a * &u;
            let cu = v.dot(&u);
            v -= &u * cu;
            for q in &accepted {
                let c = v.dot(q);
                v -= q * c;
            }
            let omega = v.norm();
            if omega <= cutoff || omega == 0.0 {
                continue; // null direction (or below the requested rank cutoff)
            }
            let q2 = -v / omega;
            accepted.push(u.clone());
            accepted.push(q2.clone());
            planes.push(Plane { q1: u, q2, omega });
        }
    }

    planes.sort_by(|p, q| q.omega.partial_cmp(&p.omega).expect("omegas are finite"));

    // orientation convention: anchor the first agent with nonzero radius on
    // the nonnegative first axis of its plane
    for plane in &mut planes {
        let mut max_r = 0.0f64;
        for i in 0..n {
            let r = plane.q1[i].hypot(plane.q2[i]);
            if r > max_r {
                max_r = r;
            }
        }
        let anchor = (0..n).find(|&i| plane.q1[i].hypot(plane.q2[i]) > 1e-12 * max_r);
        if let Some(i0) = anchor {
            let theta = plane.q2[i0].atan2(plane.q1[i0]);
            let (sin, cos) = theta.sin_cos();
            let q1 = &plane.q1 * cos + &plane.q2 * sin;
            let q2 = &plane.q2 * cos - &plane.q1 * sin;
            plane.q1 = q1;
            plane.q2 = q2;
        }
    }

    let mode_count = planes.len();
    let mut basis = DMatrix::zeros(n, 2 * mode_count);
    let mut omegas = Vec::with_capacity(mode_count);
    for (k, plane) in planes.iter().enumerate() {
        basis.set_column(2 * k, &plane.q1);
        basis.set_column(2 * k + 1, &plane.q2);
        omegas.push(plane.omega);
    }

    let degeneracy_groups = group_degenerate(&omegas, options.degeneracy_tol);

    Ok(SchurForm {
        basis,
        omegas,
        degeneracy_groups,
        labels: f.labels().to_vec(),
        source_norm,
    })
}

/// Chains nonincreasing omegas into groups whose members agree within the
/// given relative tolerance.
pub fn group_degenerate(omegas: &[f64], rel_tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..omegas.len() {
        match groups.last_mut() {
            Some(group) => {
                let prev = omegas[*group.last().unwrap()];
                if prev - omegas[k] <= rel_tol * prev.max(omegas[k]) {
                    group.push(k);
                } else {
                    groups.push(vec![k]);
                }
            }
            None => groups.push(vec![k]),
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{default_labels, EvaluationMatrix, EXACT_SKEW_TOL};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// block-diag(w_1 R, w_2 R, ...) as an EvaluationMatrix.
    pub(crate) fn block_rotation_matrix(omegas: &[f64]) -> EvaluationMatrix {
        let n = 2 * omegas.len();
        let mut entries = DMatrix::zeros(n, n);
        for (k, &w) in omegas.iter().enumerate() {
            entries[(2 * k, 2 * k + 1)] = w;
            entries[(2 * k + 1, 2 * k)] = -w;
        }
        EvaluationMatrix::new(entries, default_labels(n), EXACT_SKEW_TOL).unwrap()
    }

    pub(crate) fn random_skew(n: usize, seed: u64) -> EvaluationMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v: f64 = rng.random_range(-1.0..1.0);
                entries[(i, j)] = v;
                entries[(j, i)] = -v;
            }
        }
        EvaluationMatrix::new(entries, default_labels(n), EXACT_SKEW_TOL).unwrap()
    }

    fn reconstruction_error(f: &EvaluationMatrix, schur: &SchurForm) -> f64 {
        let full = schur.reconstruction(schur.mode_count());
        (f.entries() - full).norm()
    }

    #[test]
    fn two_by_two_block() {
        let f = block_rotation_matrix(&[5.0]);
        let schur = schur_skew(&f, SchurOptions::default()).unwrap();
        assert_eq!(schur.mode_count(), 1);
        assert!((schur.omegas()[0] - 5.0).abs() < 1e-12);
        assert!(reconstruction_error(&f, &schur) < 1e-12);
    }

    #[test]
    fn block_diagonal_two_modes() {
        let f = block_rotation_matrix(&[3.0, 1.0]);
        let schur = schur_skew(&f, SchurOptions::default()).unwrap();
        assert_eq!(schur.omegas().len(), 2);
        assert!((schur.omegas()[0] - 3.0).abs() < 1e-12);
        assert!((schur.omegas()[1] - 1.0).abs() < 1e-12);
        // basis columns are the identity columns up to in-plane rotation:
        // each plane is spanned by exactly one pair of coordinate axes
        let (q1, q2) = schur.plane(0);
        for i in 2..4 {
            assert!(q1[i].abs() < 1e-12 && q2[i].abs() < 1e-12);
        }
        assert!(reconstruction_error(&f, &schur) < 1e-12);
    }

    #[test]
    fn random_matrix_matches_svd_oracle() {
        let f = random_skew(8, 42);
        let schur = schur_skew(&f, SchurOptions::default()).unwrap();
        assert_eq!(schur.mode_count(), 4);

        // independent oracle: singular values of the same matrix
        let svd = f.entries().clone().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // paired singular values agree
        for p in 0..4 {
            let rel = (sv[2 * p] - sv[2 * p + 1]).abs() / sv[2 * p];
            assert!(rel <= 1e-9, "pair {p} relative gap {rel}");
            let against = (schur.omegas()[p] - sv[2 * p]).abs() / sv[2 * p];
            assert!(against <= 1e-9, "mode {p} vs oracle gap {against}");
        }
        let err = reconstruction_error(&f, &schur);
        assert!(err <= 1e-7 * f.frobenius_norm(), "reconstruction error {err}");
    }

    #[test]
    fn basis_is_orthonormal() {
        let f = random_skew(12, 7);
        let schur = schur_skew(&f, SchurOptions::default()).unwrap();
        let q = schur.basis();
        let gram = q.transpose() * q;
        let m = gram.nrows();
        for i in 0..m {
            for j in 0..m {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - expect).abs() < 1e-8, "gram[{i}][{j}]");
            }
        }
    }

    #[test]
    fn degenerate_spectrum_grouped() {
        let f = block_rotation_matrix(&[2.0, 2.0, 0.5]);
        let schur = schur_skew(&f, SchurOptions::default()).unwrap();
        assert_eq!(schur.omegas().len(), 3);
        assert_eq!(schur.degeneracy_groups(), &[vec![0, 1], vec![2]]);
        assert_eq!(schur.group_of(1), 0);
        assert_eq!(schur.group_of(2), 1);
        assert!(reconstruction_error(&f, &schur) < 1e-10);
    }

    #[test]
    fn odd_dimension_drops_null_mode() {
        let f = random_skew(7, 3);
        let schur = schur_skew(&f, SchurOptions::default()).unwrap();
        assert_eq!(schur.mode_count(), 3);
        assert!(reconstruction_error(&f, &schur) <= 1e-7 * f.frobenius_norm());
    }

    #[test]
    fn rank_cutoff_drops_small_modes() {
        let f = block_rotation_matrix(&[4.0, 1e-13]);
        let schur = schur_skew(&f, SchurOptions::default()).unwrap();
        assert_eq!(schur.mode_count(), 1);
        // and a permissive cutoff keeps it
        let all = schur_skew(
            &f,
            SchurOptions {
                rank_cutoff: 0.0,
                ..SchurOptions::default()
            },
        )
        .unwrap();
        assert_eq!(all.mode_count(), 2);
    }

    #[test]
    fn orientation_anchor_on_first_axis() {
        let f = random_skew(6, 11);
        let schur = schur_skew(&f, SchurOptions::default()).unwrap();
        for k in 0..schur.mode_count() {
            let (q1, q2) = schur.plane(k);
            // agent 0 has generic nonzero radius in random matrices
            assert!(q1[0] > 0.0, "anchor not on positive axis in mode {k}");
            assert!(q2[0].abs() < 1e-10, "anchor off axis in mode {k}");
        }
    }

    #[test]
    fn deterministic_given_input() {
        let f = random_skew(10, 5);
        let a = schur_skew(&f, SchurOptions::default()).unwrap();
        let b = schur_skew(&f, SchurOptions::default()).unwrap();
        assert_eq!(a.omegas(), b.omegas());
        assert_eq!(a.basis(), b.basis());
    }

    #[test]
    fn zero_matrix_has_no_modes() {
        let f = EvaluationMatrix::from_rows(
            &[vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]],
            default_labels(3),
            EXACT_SKEW_TOL,
        )
        .unwrap();
        let schur = schur_skew(&f, SchurOptions::default()).unwrap();
        assert_eq!(schur.mode_count(), 0);
        assert_eq!(schur.source_norm(), 0.0);
    }
}
