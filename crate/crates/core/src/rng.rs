//! Counter-keyed random streams.
//!
//! Every draw is addressed by `(seed, stream)` so results do not depend on
//! how many draws happened elsewhere. Streams used in this workspace:
//!
//! * solver coordinate draw at iteration `k`: stream `k`
//! * barycenter agent `a` at round `t` of `m` agents: stream `t * m + a`
//! * derived seeds: [`derive_seed`] with a caller-chosen domain tag

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A generator positioned at the start of `(seed, stream)`.
pub fn counter_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform index in `0..len` for the given counter.
pub fn uniform_index(seed: u64, stream: u64, len: usize) -> usize {
    counter_rng(seed, stream).gen_range(0..len)
}

/// A child seed for `(domain, index)`, e.g. one per benchmark cell.
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.rotate_left(32));
    rng.set_stream(domain);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_addressable() {
        let a = uniform_index(7, 1234, 100);
        let _ = uniform_index(7, 99, 100);
        assert_eq!(a, uniform_index(7, 1234, 100));
    }

    #[test]
    fn uniform_index_covers_range() {
        let mut seen = [0usize; 6];
        for k in 0..6000 {
            seen[uniform_index(1, k, 6)] += 1;
        }
        assert!(seen.iter().all(|&c| c > 850 && c < 1150), "{seen:?}");
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
        assert_eq!(derive_seed(9, 3, 4), derive_seed(9, 3, 4));
    }
}
