//! Deterministic random-number streams.
//!
//! Every simulation takes an explicit generator, and Monte Carlo fan-out
//! derives one independent stream per replica from `(master_seed, replica)`.
//! The derivation is a fixed function of the pair, so results do not depend
//! on how replicas are scheduled across threads, and replica `k` of a run is
//! reproducible in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The stream type handed to all samplers.
pub type Stream = ChaCha8Rng;

/// SplitMix64 step; a well-mixed 64-bit permutation used only for seed
/// derivation, never as the simulation generator itself.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for replica `replica` of a run with the given master seed.
pub fn replica_stream(master_seed: u64, replica: u64) -> Stream {
    let mixed = splitmix64(splitmix64(master_seed) ^ splitmix64(!replica));
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Stream for a single (non-replicated) run: replica 0 of the seed.
pub fn single_stream(master_seed: u64) -> Stream {
    replica_stream(master_seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn first_draws(mut s: Stream, n: usize) -> Vec<u64> {
        (0..n).map(|_| s.random()).collect()
    }

    #[test]
    fn streams_are_reproducible() {
        let a = first_draws(replica_stream(42, 7), 8);
        let b = first_draws(replica_stream(42, 7), 8);
        assert_eq!(a, b);
    }

    #[test]
    fn replicas_and_seeds_give_distinct_streams() {
        let base = first_draws(replica_stream(42, 0), 8);
        assert_ne!(base, first_draws(replica_stream(42, 1), 8));
        assert_ne!(base, first_draws(replica_stream(43, 0), 8));
        // Adjacent (seed, replica) pairs must not collide by a lucky xor:
        // (s^1, r) vs (s, r^1) style aliasing.
        assert_ne!(
            first_draws(replica_stream(40, 1), 8),
            first_draws(replica_stream(41, 0), 8)
        );
    }
}
