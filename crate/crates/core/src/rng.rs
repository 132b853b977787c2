//! Seeded, splittable randomness.
//!
//! Every random draw in the crate comes from a ChaCha8 substream keyed by
//! `(master seed, domain, node, round)`, so changing `m` or `T` never
//! reshuffles the draws belonging to other `(node, round)` pairs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Namespaces for independent random substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Data = 1,
    Graph = 2,
    Direction = 3,
    Derive = 4,
    Test = 5,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix(seed: u64, domain: Domain, a: u64, b: u64) -> u64 {
    let mut h = splitmix(seed);
    h = splitmix(h ^ domain as u64);
    h = splitmix(h ^ a);
    splitmix(h ^ b.rotate_left(17))
}

pub fn substream(seed: u64, domain: Domain, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, domain, a, b))
}

/// Derives a child seed (e.g. a network seed from the master seed).
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    mix(master, Domain::Derive, tag, 0)
}
