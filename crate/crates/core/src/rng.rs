//! Counter-based seeding.
//!
//! Every random stream in the crate is keyed by a tuple of integers
//! (master seed, domain tag, replicate, vertex, particle, ...). The key is
//! hashed into a ChaCha8 seed, so the values a stream produces depend only on
//! its key: never on scheduling order, worker count, or how far other
//! streams have been advanced.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags keep streams of different purposes disjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Field = 0x01,
    AmbientWalk = 0x02,
    PlantedWalk = 0x03,
    Walker = 0x04,
    Graph = 0x05,
    Estimator = 0x06,
    Percolation = 0x07,
    Bootstrap = 0x08,
    Origin = 0x09,
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, domain: Domain, parts: &[u64]) -> u64 {
    let mut h = mix64(master ^ 0x6A09_E667_F3BC_C908);
    h = mix64(h ^ domain as u64);
    for &p in parts {
        h = mix64(h ^ p);
    }
    h
}

pub fn stream_rng(master: u64, domain: Domain, parts: &[u64]) -> StreamRng {
    let seed = derive_seed(master, domain, parts);
    let mut bytes = [0u8; 32];
    let mut s = seed;
    for chunk in bytes.chunks_mut(8) {
        s = mix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}
