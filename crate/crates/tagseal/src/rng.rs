//! Random sources for command-line runs.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// The single generator of a run: seeded when `seed` is given, otherwise
/// keyed from the operating system.
pub fn run_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => ChaCha20Rng::from_os_rng(),
    }
}
