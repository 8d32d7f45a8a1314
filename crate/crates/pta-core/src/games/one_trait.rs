//! One-trait translation-invariant games: sine-series evaluation and its
//! closed-form disc-game embedding, the sorted step-game matrix, and sine
//! coefficients of odd periodic functions by adaptive quadrature.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{EvaluationMatrix, EXACT_SKEW_TOL};

/// One term A * sin(2 pi omega (x - y)) of a sine-series game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineTerm {
    pub amplitude: f64,
    pub frequency: f64,
}

/// A performance function of a single trait built from a sine series.
#[derive(Debug, Clone, PartialEq)]
pub struct OneTraitGameSpec {
    pub terms: Vec<SineTerm>,
    pub period: f64,
    pub domain: (f64, f64),
}

impl OneTraitGameSpec {
    pub fn new(terms: Vec<SineTerm>, period: f64, domain: (f64, f64)) -> Result<Self> {
        if period <= 0.0 || !period.is_finite() {
            return Err(Error::InvalidArgument("period must be positive".into()));
        }
        if domain.0 >= domain.1 {
            return Err(Error::InvalidArgument("trait domain must be nonempty".into()));
        }
        for t in &terms {
            if t.frequency <= 0.0 || !t.frequency.is_finite() || !t.amplitude.is_finite() {
                return Err(Error::InvalidArgument(
                    "sine terms need positive frequency and finite amplitude".into(),
                ));
            }
        }
        Ok(OneTraitGameSpec {
            terms,
            period,
            domain,
        })
    }

    /// Terms with the harmonic frequencies omega_k = k / P.
    pub fn from_series(amplitudes: &[f64], period: f64, domain: (f64, f64)) -> Result<Self> {
        let terms = amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| SineTerm {
                amplitude: a,
                frequency: (i + 1) as f64 / period,
            })
            .collect();
        Self::new(terms, period, domain)
    }
}

/// sum_k A_k sin(2 pi omega_k (x - y)); antisymmetric in (x, y).
pub fn sine_game_eval(spec: &OneTraitGameSpec, x: f64, y: f64) -> f64 {
    spec.terms
        .iter()
        .map(|t| t.amplitude * (2.0 * PI * t.frequency * (x - y)).sin())
        .sum()
}

/// The closed-form embedding: term k maps the trait to the circle of radius
/// sqrt|A_k|, with the sign of A_k setting the winding direction. The summed
/// cross products reproduce `sine_game_eval` exactly.
pub fn sine_embedding(spec: &OneTraitGameSpec, x: f64) -> Vec<[f64; 2]> {
    spec.terms
        .iter()
        .map(|t| {
            let radius = t.amplitude.abs().sqrt();
            let phase = 2.0 * PI * t.amplitude.signum() * t.frequency * x;
            [radius * phase.cos(), radius * phase.sin()]
        })
        .collect()
}

/// The n x n matrix of a step performance function over sorted traits:
/// +1 above the diagonal, -1 below, 0 on it.
pub fn step_game_matrix(n: usize) -> Result<EvaluationMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "step game needs at least 2 agents, got {n}"
        )));
    }
    let entries = DMatrix::from_fn(n, n, |i, j| {
        if j > i {
            1.0
        } else if j < i {
            -1.0
        } else {
            0.0
        }
    });
    let width = (n - 1).to_string().len();
    let labels = (0..n).map(|i| format!("t{i:0width$}")).collect();
    EvaluationMatrix::new(entries, labels, EXACT_SKEW_TOL)
}

/// Exact spectrum of `step_game_matrix(n)`: omega_m = cot((2m - 1) pi / 2n)
/// for m = 1..n/2. Doubles as an independent oracle for the decomposition.
pub fn step_game_omegas(n: usize) -> Vec<f64> {
    (1..=n / 2)
        .map(|m| 1.0 / (((2 * m - 1) as f64) * PI / (2.0 * n as f64)).tan())
        .collect()
}

/// Sine-series amplitudes A_k = (4 / P) * integral_0^{P/2} h(x) sin(2 pi k x / P) dx
/// for k = 1..k_max, via adaptive Simpson quadrature at absolute tolerance 1e-10.
pub fn sine_coefficients(
    h: impl Fn(f64) -> f64,
    period: f64,
    k_max: usize,
) -> Result<Vec<f64>> {
    if period <= 0.0 || !period.is_finite() {
        return Err(Error::InvalidArgument("period must be positive".into()));
    }
    let half = period / 2.0;
    (1..=k_max)
        .map(|k| {
            let omega = k as f64 / period;
            let integrand = |x: f64| h(x) * (2.0 * PI * omega * x).sin();
            let integral = adaptive_simpson(&integrand, 0.0, half, 1e-10)?;
            Ok(4.0 / period * integral)
        })
        .collect()
}

/// Adaptive Simpson with Richardson acceptance; errors out instead of
/// returning a poor estimate when the recursion depth is exhausted.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 48;
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Numeric(format!(
                "quadrature failed to converge on [{a}, {b}] (residual {:.3e})",
                delta.abs()
            )));
        }
        let half_tol = 0.5 * tol;
        Ok(recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
    }

    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::disc;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_term_eval() {
        let spec = OneTraitGameSpec::from_series(&[1.0], 1.0, (0.0, 1.0)).unwrap();
        assert!((sine_game_eval(&spec, 0.25, 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(sine_game_eval(&spec, 0.4, 0.4), 0.0);
    }

    #[test]
    fn eval_matches_term_by_term_sum() {
        let spec = OneTraitGameSpec::new(
            vec![
                SineTerm { amplitude: 0.8, frequency: 1.0 },
                SineTerm { amplitude: -0.3, frequency: 2.0 },
            ],
            1.0,
            (0.0, 1.0),
        )
        .unwrap();
        let (x, y) = (0.31, 0.87);
        let manual = 0.8 * (2.0 * PI * (x - y)).sin() + -0.3 * (4.0 * PI * (x - y)).sin();
        assert!((sine_game_eval(&spec, x, y) - manual).abs() < 1e-14);
    }

    #[test]
    fn eval_is_antisymmetric() {
        let spec = OneTraitGameSpec::from_series(&[0.5, -1.5, 0.25], 2.0, (0.0, 1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x: f64 = rng.random_range(0.0..1.0);
            let y: f64 = rng.random_range(0.0..1.0);
            assert!((sine_game_eval(&spec, x, y) + sine_game_eval(&spec, y, x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn embedding_basics() {
        let unit = OneTraitGameSpec::from_series(&[1.0], 1.0, (0.0, 1.0)).unwrap();
        let e = sine_embedding(&unit, 0.0);
        assert_eq!(e.len(), 1);
        assert!((e[0][0] - 1.0).abs() < 1e-15 && e[0][1].abs() < 1e-15);

        let neg = OneTraitGameSpec::new(
            vec![SineTerm { amplitude: -4.0, frequency: 2.0 }],
            1.0,
            (0.0, 1.0),
        )
        .unwrap();
        let e = sine_embedding(&neg, 0.37);
        let radius = (e[0][0].powi(2) + e[0][1].powi(2)).sqrt();
        assert!((radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_reproduces_eval_on_random_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let n_terms = rng.random_range(1..5usize);
            let period: f64 = rng.random_range(0.5..3.0);
            let amplitudes: Vec<f64> = (0..n_terms).map(|_| rng.random_range(-2.0..2.0)).collect();
            let spec = OneTraitGameSpec::from_series(&amplitudes, period, (0.0, period)).unwrap();
            let x: f64 = rng.random_range(0.0..period);
            let y: f64 = rng.random_range(0.0..period);
            let ex = sine_embedding(&spec, x);
            let ey = sine_embedding(&spec, y);
            let summed: f64 = ex.iter().zip(&ey).map(|(a, b)| disc(*a, *b)).sum();
            let direct = sine_game_eval(&spec, x, y);
            assert!((summed - direct).abs() <= 1e-12, "{summed} vs {direct}");
        }
    }

    #[test]
    fn step_matrix_small_cases() {
        let m2 = step_game_matrix(2).unwrap();
        assert_eq!(m2.get(0, 1), 1.0);
        assert_eq!(m2.get(1, 0), -1.0);
        assert!(step_game_matrix(1).is_err());
    }

    #[test]
    fn step_matrix_3_is_not_purely_transitive() {
        use crate::hodge;
        let m = step_game_matrix(3).unwrap();
        let parts = hodge::hodge_decompose(&m);
        let expect = [2.0 / 3.0, 0.0, -2.0 / 3.0];
        for (got, want) in parts.ratings.values().iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(parts.cyclic.frobenius_norm() > 0.1);
    }

    #[test]
    fn step_spectrum_oracle_matches_norm() {
        for n in [2usize, 3, 4, 7, 16] {
            let omegas = step_game_omegas(n);
            let sum2: f64 = omegas.iter().map(|w| 2.0 * w * w).sum();
            let expect = (n * n - n) as f64;
            assert!(
                (sum2 - expect).abs() < 1e-9 * expect.max(1.0),
                "n = {n}: {sum2} vs {expect}"
            );
        }
    }

    #[test]
    fn sine_coefficients_orthogonality() {
        let p = 2.0;
        let h = move |x: f64| (2.0 * PI * x / p).sin();
        let coeffs = sine_coefficients(h, p, 4).unwrap();
        assert!((coeffs[0] - 1.0).abs() < 1e-9);
        for c in &coeffs[1..] {
            assert!(c.abs() < 1e-9);
        }
    }

    #[test]
    fn sine_coefficients_of_step_function() {
        // odd square wave: A_k = 4 / (pi k) for odd k, 0 for even k
        let coeffs = sine_coefficients(|x: f64| x.signum(), 2.0, 9).unwrap();
        for (i, c) in coeffs.iter().enumerate() {
            let k = i + 1;
            let expect = if k % 2 == 1 { 4.0 / (PI * k as f64) } else { 0.0 };
            assert!((c - expect).abs() < 1e-8, "k = {k}: {c} vs {expect}");
        }
    }

    #[test]
    fn sine_coefficients_of_zero() {
        let coeffs = sine_coefficients(|_| 0.0, 1.0, 3).unwrap();
        assert!(coeffs.iter().all(|c| *c == 0.0));
    }
}
