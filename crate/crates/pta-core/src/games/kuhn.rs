//! Three-card Kuhn poker: exact seat-averaged payoff evaluation, the
//! one-parameter Nash equilibrium family, the self-play gradient, and
//! rational-boundary population sampling.
//!
//! A policy holds 4 x 3 decision probabilities (four decision points, cards
//! ordered Jack, Queen, King): the opener's bet, the responder's call after
//! a bet, the responder's bet after a check, and the opener's call after a
//! check then bet. Antes and bets are one chip each.

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::matrix::{build_matrix, EvaluationMatrix, EXACT_SKEW_TOL};

use super::seeded_rng;

pub const POLICY_LEN: usize = 12;

/// Offsets of the four decision points within a policy vector.
pub const P1_BET: usize = 0;
pub const P2_CALL_AFTER_BET: usize = 3;
pub const P2_BET_AFTER_CHECK: usize = 6;
pub const P1_CALL_AFTER_CHECK_BET: usize = 9;

pub const CARDS: [&str; 3] = ["J", "Q", "K"];

/// A complete policy for both seats of the three-card game.
#[derive(Debug, Clone, PartialEq)]
pub struct KuhnPolicy {
    probs: [f64; POLICY_LEN],
    /// Set when the policy was produced by `nash`.
    pub alpha: Option<f64>,
}

impl KuhnPolicy {
    pub fn new(probs: [f64; POLICY_LEN]) -> Result<Self> {
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite() || !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidArgument(format!(
                    "decision probability {i} = {p} outside [0, 1]"
                )));
            }
        }
        Ok(KuhnPolicy { probs, alpha: None })
    }

    pub fn probs(&self) -> &[f64; POLICY_LEN] {
        &self.probs
    }

    /// Coordinates pinned to exactly 0 or 1.
    pub fn clamped_coordinates(&self) -> Vec<usize> {
        (0..POLICY_LEN)
            .filter(|&i| self.probs[i] == 0.0 || self.probs[i] == 1.0)
            .collect()
    }

    fn with_coordinate(&self, index: usize, value: f64) -> KuhnPolicy {
        let mut probs = self.probs;
        probs[index] = value;
        KuhnPolicy { probs, alpha: None }
    }
}

/// The classical one-parameter Nash equilibrium family, alpha in [0, 1/3]:
/// the opener bluffs a Jack with probability alpha and value-bets a King
/// with probability 3 alpha.
pub fn nash(alpha: f64) -> Result<KuhnPolicy> {
    if !(0.0..=1.0 / 3.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} outside [0, 1/3]"
        )));
    }
    let third = 1.0 / 3.0;
    let mut probs = [0.0; POLICY_LEN];
    probs[P1_BET] = alpha;
    probs[P1_BET + 1] = 0.0;
    probs[P1_BET + 2] = 3.0 * alpha;
    probs[P2_CALL_AFTER_BET] = 0.0;
    probs[P2_CALL_AFTER_BET + 1] = third;
    probs[P2_CALL_AFTER_BET + 2] = 1.0;
    probs[P2_BET_AFTER_CHECK] = third;
    probs[P2_BET_AFTER_CHECK + 1] = 0.0;
    probs[P2_BET_AFTER_CHECK + 2] = 1.0;
    probs[P1_CALL_AFTER_CHECK_BET] = 0.0;
    probs[P1_CALL_AFTER_CHECK_BET + 1] = alpha + third;
    probs[P1_CALL_AFTER_CHECK_BET + 2] = 1.0;
    let mut policy = KuhnPolicy::new(probs)?;
    policy.alpha = Some(alpha);
    Ok(policy)
}

/// Expected winnings of the opener holding `opener` policy against
/// `responder`, enumerating all six ordered deals and every branch.
fn seat_value(opener: &KuhnPolicy, responder: &KuhnPolicy) -> f64 {
    let x = &opener.probs;
    let y = &responder.probs;
    let mut total = 0.0;
    for c1 in 0..3usize {
        for c2 in 0..3usize {
            if c1 == c2 {
                continue;
            }
            let showdown = if c1 > c2 { 1.0 } else { -1.0 };
            let bet = x[P1_BET + c1];
            let call = y[P2_CALL_AFTER_BET + c2];
            let raise = y[P2_BET_AFTER_CHECK + c2];
            let call_back = x[P1_CALL_AFTER_CHECK_BET + c1];
            // bet branch: responder calls (2 chips at stake) or folds (+1)
            let bet_value = call * 2.0 * showdown + (1.0 - call) * 1.0;
            // check branch: responder bets (opener calls for 2 or folds for -1)
            // or checks through (1 chip showdown)
            let check_value = raise * (call_back * 2.0 * showdown + (1.0 - call_back) * (-1.0))
                + (1.0 - raise) * showdown;
            total += bet * bet_value + (1.0 - bet) * check_value;
        }
    }
    total / 6.0
}

/// Seat-averaged advantage: expected winnings when the two agents are
/// equally likely to open. Exactly antisymmetric by construction.
pub fn eval(a: &KuhnPolicy, b: &KuhnPolicy) -> f64 {
    0.5 * (seat_value(a, b) - seat_value(b, a))
}

/// Exact self-play gradient v(z) of the advantage in the first argument at
/// x = y = z. The payoff is multilinear in each decision probability, so
/// each partial derivative is an endpoint difference rather than a finite
/// difference.
pub fn selfplay_gradient(z: &KuhnPolicy) -> [f64; POLICY_LEN] {
    let mut grad = [0.0; POLICY_LEN];
    for (c, g) in grad.iter_mut().enumerate() {
        let hi = eval(&z.with_coordinate(c, 1.0), z);
        let lo = eval(&z.with_coordinate(c, 0.0), z);
        *g = hi - lo;
    }
    grad
}

/// Samples policies near `center` on its rational boundary: coordinates
/// clamped at exactly 0 or 1 stay fixed, the rest receive seeded Gaussian
/// noise of standard deviation `sigma`, clipped to [0, 1]. Deterministic per
/// seed.
pub fn sample_boundary(
    center: &KuhnPolicy,
    sigma: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<KuhnPolicy>> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma = {sigma} must be nonnegative")));
    }
    if sigma == 0.0 {
        return Ok(vec![center.clone(); count]);
    }
    let mut rng = seeded_rng(seed);
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::Numeric(format!("normal setup: {e}")))?;
    let clamped = center.clamped_coordinates();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut probs = center.probs;
        for (c, p) in probs.iter_mut().enumerate() {
            if clamped.contains(&c) {
                continue;
            }
            *p = (*p + noise.sample(&mut rng)).clamp(0.0, 1.0);
        }
        out.push(KuhnPolicy { probs, alpha: None });
    }
    Ok(out)
}

/// Round-robin advantage matrix over a policy population.
pub fn matrix(population: &[KuhnPolicy]) -> Result<EvaluationMatrix> {
    let width = if population.len() <= 1 {
        1
    } else {
        (population.len() - 1).to_string().len()
    };
    let labels = (0..population.len())
        .map(|i| format!("policy{i:0width$}"))
        .collect();
    build_matrix(labels, population, EXACT_SKEW_TOL, eval)
}

/// All 4096 deterministic policies; the exhaustive responder set used for
/// exploitability checks.
pub fn pure_policies() -> Vec<KuhnPolicy> {
    (0..(1u16 << POLICY_LEN))
        .map(|bits| {
            let mut probs = [0.0; POLICY_LEN];
            for (c, p) in probs.iter_mut().enumerate() {
                if bits & (1 << c) != 0 {
                    *p = 1.0;
                }
            }
            KuhnPolicy { probs, alpha: None }
        })
        .collect()
}

/// Best advantage any deterministic policy achieves against `policy`; zero
/// (to rounding) exactly when the policy is an equilibrium.
pub fn exploitability(policy: &KuhnPolicy) -> f64 {
    pure_policies()
        .iter()
        .map(|pure| eval(pure, policy))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game_value_is_minus_one_eighteenth() {
        let z = nash(1.0 / 6.0).unwrap();
        assert!((seat_value(&z, &z) + 1.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn self_play_is_zero() {
        let z = nash(0.2).unwrap();
        assert_eq!(eval(&z, &z), 0.0);
    }

    #[test]
    fn nash_family_is_mutually_neutral() {
        for a1 in [0.0, 0.1, 1.0 / 6.0, 0.3, 1.0 / 3.0] {
            for a2 in [0.0, 0.05, 1.0 / 6.0, 1.0 / 3.0] {
                let v = eval(&nash(a1).unwrap(), &nash(a2).unwrap());
                assert!(v.abs() <= 1e-12, "NE({a1}) vs NE({a2}) = {v}");
            }
        }
    }

    #[test]
    fn nash_endpoints() {
        let z0 = nash(0.0).unwrap();
        assert_eq!(z0.probs()[P1_BET], 0.0);
        assert_eq!(z0.probs()[P1_BET + 2], 0.0);
        let z13 = nash(1.0 / 3.0).unwrap();
        assert_eq!(z13.probs()[P1_BET + 2], 1.0);
        assert!(nash(0.4).is_err());
        assert!(nash(-0.01).is_err());
    }

    #[test]
    fn nash_is_unexploitable_by_pure_responses() {
        for alpha in [0.0, 1.0 / 6.0, 1.0 / 3.0] {
            let e = exploitability(&nash(alpha).unwrap());
            assert!(e <= 1e-12, "alpha {alpha}: exploitability {e}");
        }
    }

    #[test]
    fn always_bet_loses_to_nash() {
        let all_in = KuhnPolicy::new([1.0; POLICY_LEN]).unwrap();
        let v = eval(&all_in, &nash(1.0 / 3.0).unwrap());
        // pinned by tree enumeration: exactly -1/9
        assert!((v + 1.0 / 9.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn eval_is_multilinear_in_each_coordinate() {
        let z = nash(0.25).unwrap();
        let other = KuhnPolicy::new([0.3; POLICY_LEN]).unwrap();
        for c in 0..POLICY_LEN {
            let f0 = eval(&z.with_coordinate(c, 0.0), &other);
            let f1 = eval(&z.with_coordinate(c, 0.5), &other);
            let f2 = eval(&z.with_coordinate(c, 1.0), &other);
            let second_difference = f2 - 2.0 * f1 + f0;
            assert!(second_difference.abs() < 1e-10, "coordinate {c}");
        }
    }

    #[test]
    fn gradient_vanishes_on_free_coordinates_at_nash() {
        let z = nash(1.0 / 6.0).unwrap();
        let g = selfplay_gradient(&z);
        for c in [
            P1_BET,
            P1_BET + 2,
            P2_CALL_AFTER_BET + 1,
            P2_BET_AFTER_CHECK,
            P1_CALL_AFTER_CHECK_BET + 1,
        ] {
            assert!(g[c].abs() <= 1e-10, "free coordinate {c}: {}", g[c]);
        }
    }

    #[test]
    fn gradient_points_outward_on_clamped_coordinates() {
        let z = nash(1.0 / 6.0).unwrap();
        let g = selfplay_gradient(&z);
        for c in z.clamped_coordinates() {
            if z.probs()[c] == 0.0 {
                assert!(g[c] <= 1e-12, "coordinate {c} clamped at 0 has gradient {}", g[c]);
            } else {
                assert!(g[c] >= -1e-12, "coordinate {c} clamped at 1 has gradient {}", g[c]);
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let z = KuhnPolicy::new([
            0.21, 0.48, 0.77, 0.11, 0.5, 0.93, 0.35, 0.27, 0.66, 0.08, 0.41, 0.88,
        ])
        .unwrap();
        let g = selfplay_gradient(&z);
        let h = 1e-6;
        for c in 0..POLICY_LEN {
            let plus = eval(&z.with_coordinate(c, z.probs()[c] + h), &z);
            let minus = eval(&z.with_coordinate(c, z.probs()[c] - h), &z);
            let fd = (plus - minus) / (2.0 * h);
            assert!((g[c] - fd).abs() < 1e-6, "coordinate {c}: {} vs {fd}", g[c]);
        }
    }

    #[test]
    fn boundary_sampling_contract() {
        let center = nash(1.0 / 6.0).unwrap();

        let frozen = sample_boundary(&center, 0.0, 4, 1).unwrap();
        assert!(frozen.iter().all(|p| p.probs() == center.probs()));

        let a = sample_boundary(&center, 0.05, 300, 7).unwrap();
        let b = sample_boundary(&center, 0.05, 300, 7).unwrap();
        assert_eq!(a, b);

        let clamped = center.clamped_coordinates();
        for policy in &a {
            for &c in &clamped {
                assert_eq!(policy.probs()[c], center.probs()[c]);
            }
            for p in policy.probs() {
                assert!((0.0..=1.0).contains(p));
            }
        }
        // free coordinates actually move
        assert!(a.iter().any(|p| p.probs()[P1_BET] != center.probs()[P1_BET]));
    }

    #[test]
    fn policy_validation() {
        let mut probs = [0.5; POLICY_LEN];
        probs[3] = 1.2;
        assert!(KuhnPolicy::new(probs).is_err());
        probs[3] = f64::NAN;
        assert!(KuhnPolicy::new(probs).is_err());
    }

    #[test]
    fn population_matrix_skew() {
        let pop = sample_boundary(&nash(1.0 / 6.0).unwrap(), 0.05, 12, 3).unwrap();
        let m = matrix(&pop).unwrap();
        assert_eq!(m.n(), 12);
        assert!(m.skew_report(1e-12).pass);
    }
}
