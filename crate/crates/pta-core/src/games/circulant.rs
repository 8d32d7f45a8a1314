//! Circulant matrix games (rock-paper-scissors and extensions), mixed
//! strategies, and fictitious self-play population generation.

use crate::error::{Error, Result};
use crate::matrix::{build_matrix, EvaluationMatrix, EXACT_SKEW_TOL};

use super::{sample_simplex, seeded_rng};

/// Builds the n x n circulant utility matrix generated by `first_row`.
///
/// The row must start with 0 and generate a skew-symmetric circulant
/// (row[k] = -row[n-k] for all k). The classic RPS row is [0,-1,1]; the
/// five-strategy extension uses [0,-1,1,-1,1].
pub fn circulant_game(first_row: &[i64]) -> Result<EvaluationMatrix> {
    let n = first_row.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "circulant row needs at least 2 entries".into(),
        ));
    }
    if first_row[0] != 0 {
        return Err(Error::InvalidArgument(
            "circulant row must start with 0 (self-play ties)".into(),
        ));
    }
    for k in 1..n {
        if first_row[k] != -first_row[n - k] {
            return Err(Error::InvalidArgument(format!(
                "row does not generate a skew-symmetric circulant: row[{k}] = {} but row[{}] = {}",
                first_row[k],
                n - k,
                first_row[n - k]
            )));
        }
    }
    let entries = nalgebra::DMatrix::from_fn(n, n, |i, j| first_row[(n + j - i) % n] as f64);
    EvaluationMatrix::new(entries, strategy_labels(n), EXACT_SKEW_TOL)
}

/// rock/paper/scissors names for the classic sizes, s0.. otherwise.
pub fn strategy_labels(n: usize) -> Vec<String> {
    match n {
        3 => vec!["rock".into(), "paper".into(), "scissors".into()],
        5 => vec![
            "rock".into(),
            "paper".into(),
            "scissors".into(),
            "lizard".into(),
            "spock".into(),
        ],
        _ => (0..n).map(|i| format!("s{i}")).collect(),
    }
}

/// A probability vector over pure strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidArgument(
                "mixed strategy probabilities must be nonnegative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "mixed strategy sums to {sum}, expected 1"
            )));
        }
        Ok(MixedStrategy(probs))
    }

    pub fn pure(index: usize, n: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        MixedStrategy(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_pure(&self) -> bool {
        self.0.iter().any(|&p| p == 1.0)
    }
}

/// Expected payoff p^T U q of one mixed strategy against another.
pub fn mixed_eval(utility: &EvaluationMatrix, p: &MixedStrategy, q: &MixedStrategy) -> Result<f64> {
    let n = utility.n();
    if p.len() != n || q.len() != n {
        return Err(Error::InvalidArgument(format!(
            "strategy lengths {} and {} do not match utility size {n}",
            p.len(),
            q.len()
        )));
    }
    let mut total = 0.0;
    for i in 0..n {
        if p.probs()[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..n {
            row += utility.get(i, j) * q.probs()[j];
        }
        total += p.probs()[i] * row;
    }
    Ok(total)
}

/// Fictitious self-play: starting from a seeded random mixed strategy, each
/// step appends the pure best response to the running empirical average of
/// the population (lowest strategy index on ties). Returns the population of
/// size steps + 1.
pub fn fictitious_play(
    utility: &EvaluationMatrix,
    steps: usize,
    seed: u64,
) -> Result<Vec<MixedStrategy>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let n = utility.n();
    let mut rng = seeded_rng(seed);
    let init = MixedStrategy::new(normalize(sample_simplex(&mut rng, n)))?;

    let mut average: Vec<f64> = init.probs().to_vec();
    let mut population = vec![init];
    for _ in 0..steps {
        let mut best = 0usize;
        let mut best_payoff = f64::NEG_INFINITY;
        for i in 0..n {
            let payoff: f64 = (0..n).map(|j| utility.get(i, j) * average[j]).sum();
            if payoff > best_payoff {
                best_payoff = payoff;
                best = i;
            }
        }
        population.push(MixedStrategy::pure(best, n));
        let t = population.len() as f64;
        for (j, a) in average.iter_mut().enumerate() {
            let latest = if j == best { 1.0 } else { 0.0 };
            *a += (latest - *a) / t;
        }
    }
    Ok(population)
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    for x in &mut v {
        *x /= sum;
    }
    v
}

/// Empirical mean strategy of a population.
pub fn population_average(population: &[MixedStrategy]) -> Vec<f64> {
    let n = population[0].len();
    let mut avg = vec![0.0; n];
    for member in population {
        for (a, p) in avg.iter_mut().zip(member.probs()) {
            *a += p;
        }
    }
    for a in &mut avg {
        *a /= population.len() as f64;
    }
    avg
}

/// Round-robin expected-payoff matrix over a mixed-strategy population.
///
/// Entries are antisymmetrized pairwise (p^T U q and its transpose are
/// averaged) so the result is exactly skew despite floating-point dot
/// products.
pub fn population_matrix(
    utility: &EvaluationMatrix,
    population: &[MixedStrategy],
) -> Result<EvaluationMatrix> {
    let width = if population.len() <= 1 {
        1
    } else {
        (population.len() - 1).to_string().len()
    };
    let labels = (0..population.len())
        .map(|i| format!("agent{i:0width$}"))
        .collect();
    build_matrix(labels, population, EXACT_SKEW_TOL, |p, q| {
        let forward = mixed_eval(utility, p, q).expect("population matches utility size");
        let backward = mixed_eval(utility, q, p).expect("population matches utility size");
        0.5 * (forward - backward)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_rps_matrix() {
        let u = circulant_game(&[0, -1, 1]).unwrap();
        assert_eq!(u.labels(), &["rock", "paper", "scissors"]);
        // rock loses to paper, beats scissors
        assert_eq!(u.get(0, 1), -1.0);
        assert_eq!(u.get(0, 2), 1.0);
        assert_eq!(u.get(1, 2), -1.0);
    }

    #[test]
    fn rps2_matches_reference_matrix() {
        let u = circulant_game(&[0, -1, 1, -1, 1]).unwrap();
        let expect = [
            [0.0, -1.0, 1.0, -1.0, 1.0],
            [1.0, 0.0, -1.0, 1.0, -1.0],
            [-1.0, 1.0, 0.0, -1.0, 1.0],
            [1.0, -1.0, 1.0, 0.0, -1.0],
            [-1.0, 1.0, -1.0, 1.0, 0.0],
        ];
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(u.get(i, j), expect[i][j], "at ({i},{j})");
            }
        }
    }

    #[test]
    fn non_skew_circulant_rejected() {
        assert!(circulant_game(&[0, 1, 1]).is_err());
        assert!(circulant_game(&[1, 0, 0]).is_err());
    }

    #[test]
    fn mixed_eval_cases() {
        let u = circulant_game(&[0, -1, 1]).unwrap();
        let rock = MixedStrategy::pure(0, 3);
        let scissors = MixedStrategy::pure(2, 3);
        assert_eq!(mixed_eval(&u, &rock, &scissors).unwrap(), 1.0);
        assert_eq!(mixed_eval(&u, &rock, &rock).unwrap(), 0.0);

        let u5 = circulant_game(&[0, -1, 1, -1, 1]).unwrap();
        let uniform = MixedStrategy::new(vec![0.2; 5]).unwrap();
        let other = MixedStrategy::new(vec![0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(mixed_eval(&u5, &uniform, &other).unwrap().abs() < 1e-15);
    }

    #[test]
    fn mixed_eval_shape_mismatch() {
        let u = circulant_game(&[0, -1, 1]).unwrap();
        let p = MixedStrategy::new(vec![0.5, 0.5]).unwrap();
        assert!(mixed_eval(&u, &p, &p).is_err());
    }

    #[test]
    fn mixed_strategy_validation() {
        assert!(MixedStrategy::new(vec![0.5, 0.6]).is_err());
        assert!(MixedStrategy::new(vec![-0.1, 1.1]).is_err());
        assert!(MixedStrategy::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn fictitious_play_appends_pure_strategies() {
        let u = circulant_game(&[0, -1, 1]).unwrap();
        let pop = fictitious_play(&u, 30, 4).unwrap();
        assert_eq!(pop.len(), 31);
        assert!(pop[1..].iter().all(|m| m.is_pure()));
        // best responses cycle through all three actions
        for i in 0..3 {
            assert!(pop[1..].iter().any(|m| m.probs()[i] == 1.0));
        }
    }

    #[test]
    fn fictitious_play_single_step() {
        let u = circulant_game(&[0, -1, 1]).unwrap();
        assert_eq!(fictitious_play(&u, 1, 0).unwrap().len(), 2);
    }

    #[test]
    fn fictitious_play_deterministic() {
        let u = circulant_game(&[0, -1, 1, -1, 1]).unwrap();
        let a = fictitious_play(&u, 50, 12).unwrap();
        let b = fictitious_play(&u, 50, 12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fictitious_play_converges_toward_uniform() {
        // the uniform mixture is the unique equilibrium of the circulant
        // game; the empirical average drifts toward it at a slow rate, so a
        // generous horizon is used (200 steps still sits near L1 ~ 0.1)
        let u = circulant_game(&[0, -1, 1, -1, 1]).unwrap();
        for seed in [0, 7] {
            let short = fictitious_play(&u, 200, seed).unwrap();
            let avg = population_average(&short);
            let l1_short: f64 = avg.iter().map(|a| (a - 0.2).abs()).sum();
            assert!(l1_short <= 0.15, "seed {seed}: 200-step L1 {l1_short}");

            let long = fictitious_play(&u, 2000, seed).unwrap();
            let avg = population_average(&long);
            let l1_long: f64 = avg.iter().map(|a| (a - 0.2).abs()).sum();
            assert!(l1_long <= 0.05, "seed {seed}: 2000-step L1 {l1_long}");
            assert!(l1_long < l1_short);
        }
    }

    #[test]
    fn population_matrix_is_skew_and_labeled() {
        let u = circulant_game(&[0, -1, 1, -1, 1]).unwrap();
        let pop = fictitious_play(&u, 20, 3).unwrap();
        let m = population_matrix(&u, &pop).unwrap();
        assert_eq!(m.n(), 21);
        assert_eq!(m.labels()[0], "agent00");
        let report = m.skew_report(1e-15);
        assert!(report.pass);
    }
}
