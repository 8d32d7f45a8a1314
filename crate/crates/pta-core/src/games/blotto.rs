//! Colonel Blotto: troop-allotment enumeration, Dirichlet sampling, match
//! scoring, and the agglomerated trait that orders [1,2,4]-payout games.

use crate::error::{Error, Result};
use crate::matrix::{build_matrix, EvaluationMatrix, EXACT_SKEW_TOL};

use super::{sample_simplex, seeded_rng};

/// Default ceiling on full enumeration before sampling is required.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 10_000;

/// Game parameters: N troops distributed across K zones with payouts Z.
#[derive(Debug, Clone, PartialEq)]
pub struct BlottoSpec {
    pub troops: u32,
    pub zones: usize,
    pub payouts: Vec<f64>,
}

impl BlottoSpec {
    pub fn new(troops: u32, zones: usize, payouts: Vec<f64>) -> Result<Self> {
        if zones == 0 {
            return Err(Error::InvalidArgument("zones must be at least 1".into()));
        }
        if payouts.len() != zones {
            return Err(Error::InvalidArgument(format!(
                "expected {} payouts, got {}",
                zones,
                payouts.len()
            )));
        }
        if payouts.iter().any(|z| !z.is_finite() || *z <= 0.0) {
            return Err(Error::InvalidArgument("payouts must be positive".into()));
        }
        Ok(BlottoSpec {
            troops,
            zones,
            payouts,
        })
    }

    pub fn uniform(troops: u32, zones: usize) -> Result<Self> {
        Self::new(troops, zones, vec![1.0; zones])
    }

    /// C(N + K - 1, K - 1) distinct allotments.
    pub fn strategy_count(&self) -> u128 {
        binomial(self.troops as u128 + self.zones as u128 - 1, self.zones as u128 - 1)
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Per-zone troop counts summing to the spec's total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allotment(Vec<u32>);

impl Allotment {
    pub fn new(counts: Vec<u32>, troops: u32) -> Result<Self> {
        let sum: u32 = counts.iter().sum();
        if sum != troops {
            return Err(Error::InvalidArgument(format!(
                "allotment sums to {sum}, expected {troops}"
            )));
        }
        Ok(Allotment(counts))
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn label(&self) -> String {
        self.0
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// All compositions of N into K parts in lexicographic order.
pub fn enumerate(spec: &BlottoSpec, limit: Option<usize>) -> Result<Vec<Allotment>> {
    let limit = limit.unwrap_or(DEFAULT_ENUMERATION_LIMIT);
    let count = spec.strategy_count();
    if count > limit as u128 {
        return Err(Error::EnumerationLimit { count, limit });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; spec.zones];
    compose(spec.troops, 0, &mut current, &mut out);
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

fn compose(remaining: u32, zone: usize, current: &mut Vec<u32>, out: &mut Vec<Allotment>) {
    if zone == current.len() - 1 {
        current[zone] = remaining;
        out.push(Allotment(current.clone()));
        return;
    }
    for c in 0..=remaining {
        current[zone] = c;
        compose(remaining - c, zone + 1, current, out);
    }
}

/// Draws allotments from Dirichlet(1, ..., 1) over the zones, scaled by N
/// and rounded with a largest-remainder correction so every sample re-sums
/// to N. Deterministic per seed; duplicates permitted.
pub fn sample(spec: &BlottoSpec, count: usize, seed: u64) -> Result<Vec<Allotment>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    if spec.zones == 1 {
        return Ok(vec![Allotment(vec![spec.troops]); count]);
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let weights = sample_simplex(&mut rng, spec.zones);
        out.push(round_to_allotment(&weights, spec.troops));
    }
    Ok(out)
}

/// Largest-remainder rounding of N * weights onto nonnegative integers
/// summing to N; ties broken by zone index.
fn round_to_allotment(weights: &[f64], troops: u32) -> Allotment {
    let scaled: Vec<f64> = weights.iter().map(|w| w * troops as f64).collect();
    let mut counts: Vec<u32> = scaled.iter().map(|x| x.floor() as u32).collect();
    let assigned: u32 = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let fi = scaled[i] - scaled[i].floor();
        let fj = scaled[j] - scaled[j].floor();
        fj.partial_cmp(&fi).unwrap().then(i.cmp(&j))
    });
    for k in 0..(troops - assigned) as usize {
        counts[order[k % order.len()]] += 1;
    }
    Allotment(counts)
}

/// Scores one match: each zone pays its conqueror, ties pay nobody, and the
/// player with the larger total payout scores 0.5 (the loser -0.5).
pub fn eval(x: &Allotment, y: &Allotment, payouts: &[f64]) -> Result<f64> {
    if x.0.len() != y.0.len() || x.0.len() != payouts.len() {
        return Err(Error::InvalidArgument(format!(
            "zone counts disagree: {} vs {} vs {} payouts",
            x.0.len(),
            y.0.len(),
            payouts.len()
        )));
    }
    let mut px = 0.0;
    let mut py = 0.0;
    for ((&a, &b), &z) in x.0.iter().zip(&y.0).zip(payouts) {
        if a > b {
            px += z;
        } else if b > a {
            py += z;
        }
    }
    Ok(if px > py {
        0.5
    } else if px < py {
        -0.5
    } else {
        0.0
    })
}

/// Agglomerated trait w(x) = x_3 + x_2 / (N - x_3 + 1) that totally orders
/// three-zone [1,2,4] games.
pub fn w124(x: &Allotment, troops: u32) -> Result<f64> {
    if x.0.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "the agglomerated trait is defined for K = 3, got K = {}",
            x.0.len()
        )));
    }
    let x2 = x.0[1] as f64;
    let x3 = x.0[2] as f64;
    Ok(x3 + x2 / (troops as f64 - x3 + 1.0))
}

/// Round-robin evaluation matrix over a population of allotments.
pub fn matrix(spec: &BlottoSpec, agents: &[Allotment]) -> Result<EvaluationMatrix> {
    let labels = agents
        .iter()
        .enumerate()
        .map(|(i, a)| format!("{i}:{}", a.label()))
        .collect();
    build_matrix(labels, agents, EXACT_SKEW_TOL, |x, y| {
        eval(x, y, &spec.payouts).expect("population shares the spec's zone count")
    })
}

/// Uniformly random zone permutation applied to every allotment; used to
/// probe the label symmetry of uniform-payout games.
pub fn permute_zones(agents: &[Allotment], permutation: &[usize]) -> Result<Vec<Allotment>> {
    let mut seen = vec![false; permutation.len()];
    for &p in permutation {
        if p >= permutation.len() || seen[p] {
            return Err(Error::InvalidPermutation {
                reason: "zone permutation invalid".into(),
            });
        }
        seen[p] = true;
    }
    agents
        .iter()
        .map(|a| {
            if a.0.len() != permutation.len() {
                return Err(Error::InvalidArgument("zone count mismatch".into()));
            }
            Ok(Allotment(permutation.iter().map(|&p| a.0[p]).collect()))
        })
        .collect()
}

/// Convenience for tests and the CLI: sample only when enumeration would
/// blow past the limit.
pub fn population(spec: &BlottoSpec, sample_count: Option<usize>, seed: u64) -> Result<Vec<Allotment>> {
    match sample_count {
        Some(count) => sample(spec, count, seed),
        None => enumerate(spec, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_counts() {
        let spec = BlottoSpec::uniform(5, 3).unwrap();
        let all = enumerate(&spec, None).unwrap();
        assert_eq!(all.len(), 21);
        assert_eq!(spec.strategy_count(), 21);

        let big = BlottoSpec::uniform(75, 3).unwrap();
        assert_eq!(big.strategy_count(), 2926);
        assert_eq!(enumerate(&big, None).unwrap().len(), 2926);

        let degenerate = BlottoSpec::uniform(0, 2).unwrap();
        let all = enumerate(&degenerate, None).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].counts(), &[0, 0]);
    }

    #[test]
    fn enumerate_is_lexicographic() {
        let spec = BlottoSpec::uniform(2, 3).unwrap();
        let all = enumerate(&spec, None).unwrap();
        let got: Vec<&[u32]> = all.iter().map(|a| a.counts()).collect();
        assert_eq!(
            got,
            vec![
                &[0, 0, 2][..],
                &[0, 1, 1],
                &[0, 2, 0],
                &[1, 0, 1],
                &[1, 1, 0],
                &[2, 0, 0]
            ]
        );
    }

    #[test]
    fn enumerate_respects_limit() {
        let spec = BlottoSpec::uniform(45, 4).unwrap();
        // C(48, 3) = 17,296 > 10,000
        match enumerate(&spec, None) {
            Err(Error::EnumerationLimit { count, limit }) => {
                assert_eq!(count, 17_296);
                assert_eq!(limit, DEFAULT_ENUMERATION_LIMIT);
            }
            other => panic!("expected limit error, got {other:?}"),
        }
        assert!(enumerate(&spec, Some(20_000)).is_ok());
    }

    #[test]
    fn sampling_is_deterministic_and_sums() {
        let spec = BlottoSpec::uniform(75, 3).unwrap();
        let a = sample(&spec, 500, 9).unwrap();
        let b = sample(&spec, 500, 9).unwrap();
        assert_eq!(a, b);
        for allotment in &a {
            assert_eq!(allotment.counts().iter().sum::<u32>(), 75);
        }
        let c = sample(&spec, 10, 10).unwrap();
        assert_ne!(a[..10], c[..]);
    }

    #[test]
    fn single_zone_sampling_is_forced() {
        let spec = BlottoSpec::uniform(7, 1).unwrap();
        for allotment in sample(&spec, 5, 0).unwrap() {
            assert_eq!(allotment.counts(), &[7]);
        }
    }

    #[test]
    fn eval_examples() {
        let z = [1.0, 1.0, 1.0];
        let x = Allotment::new(vec![3, 1, 1], 5).unwrap();
        let y = Allotment::new(vec![1, 2, 2], 5).unwrap();
        assert_eq!(eval(&x, &y, &z).unwrap(), -0.5);
        assert_eq!(eval(&x, &x, &z).unwrap(), 0.0);

        // the paper's example: [70,0,5] defeats [38,37,0]
        let a = Allotment::new(vec![70, 0, 5], 75).unwrap();
        let b = Allotment::new(vec![38, 37, 0], 75).unwrap();
        assert_eq!(eval(&a, &b, &z).unwrap(), 0.5);
    }

    #[test]
    fn eval_rejects_mismatched_zones() {
        let x = Allotment::new(vec![1, 1], 2).unwrap();
        let y = Allotment::new(vec![1, 1, 0], 2).unwrap();
        assert!(eval(&x, &y, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn w124_values() {
        let x = Allotment::new(vec![0, 2, 3], 5).unwrap();
        assert!((w124(&x, 5).unwrap() - (3.0 + 2.0 / 3.0)).abs() < 1e-15);
        let y = Allotment::new(vec![5, 0, 0], 5).unwrap();
        assert_eq!(w124(&y, 5).unwrap(), 0.0);
        let bad = Allotment::new(vec![5, 0], 5).unwrap();
        assert!(w124(&bad, 5).is_err());
    }

    #[test]
    fn w124_orders_the_124_game() {
        // sign(w(x) - w(y)) must match the [1,2,4] win rule for all pairs
        let spec = BlottoSpec::new(10, 3, vec![1.0, 2.0, 4.0]).unwrap();
        let all = enumerate(&spec, None).unwrap();
        for x in &all {
            for y in &all {
                let rule = eval(x, y, &spec.payouts).unwrap();
                let w = w124(x, 10).unwrap() - w124(y, 10).unwrap();
                let by_trait = if w > 0.0 {
                    0.5
                } else if w < 0.0 {
                    -0.5
                } else {
                    0.0
                };
                assert_eq!(rule, by_trait, "x={:?} y={:?}", x.counts(), y.counts());
            }
        }
    }

    #[test]
    fn matrix_entries_are_half_integers() {
        let spec = BlottoSpec::uniform(5, 3).unwrap();
        let agents = enumerate(&spec, None).unwrap();
        let m = matrix(&spec, &agents).unwrap();
        assert_eq!(m.n(), 21);
        for i in 0..21 {
            for j in 0..21 {
                let v = m.get(i, j);
                assert!(v == 0.0 || v == 0.5 || v == -0.5);
            }
        }
    }
}
