//! Seeded market generators shared by the benchmarks.

use jobmarket_core::Market;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random market with integer surpluses in `0..=20`.
pub fn random_market(seed: u64, capacities: &[usize], workers: usize) -> Market {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<i64>> = capacities
        .iter()
        .map(|_| (0..workers).map(|_| rng.gen_range(0..=20)).collect())
        .collect();
    Market::from_ints(capacities, &rows).expect("generated markets are valid")
}
