//! Exact, seedable generators for the game families used throughout the
//! toolkit: Colonel Blotto, circulant matrix games with fictitious
//! self-play, three-card Kuhn poker, and one-trait sine-series games.

pub mod blotto;
pub mod circulant;
pub mod kuhn;
pub mod one_trait;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All generator randomness flows through seeded ChaCha streams so that
/// populations are reproducible across runs and platforms.
pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniform draw from the probability simplex (Dirichlet with unit
/// concentration), via normalized unit exponentials.
pub(crate) fn sample_simplex(rng: &mut ChaCha8Rng, dims: usize) -> Vec<f64> {
    let mut draws: Vec<f64> = (0..dims)
        .map(|_| {
            let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            -u.ln()
        })
        .collect();
    let total: f64 = draws.iter().sum();
    for d in &mut draws {
        *d /= total;
    }
    draws
}
