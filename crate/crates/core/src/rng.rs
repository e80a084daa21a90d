//! Order-independent random streams for the simulation harness.
//!
//! Every replicate gets its own ChaCha8 keystream: the 256-bit key is mixed
//! from the master seed and the condition, and the replicate index selects
//! the stream. Draws for replicate `r` therefore never depend on which other
//! replicates ran, or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function applied to `x + γ`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Domain tags keep dataset draws and bootstrap draws on separate keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Dataset = 1,
    Bootstrap = 2,
}

/// Folds `parts` into a 256-bit ChaCha key.
pub fn derive_key(master_seed: u64, domain: Domain, parts: &[u64]) -> [u8; 32] {
    let mut h = splitmix64(master_seed ^ splitmix64(domain as u64));
    for &p in parts {
        h = splitmix64(h ^ splitmix64(p));
    }
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        h = splitmix64(h.wrapping_add(i as u64));
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    key
}

pub fn stream_rng(key: [u8; 32], stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Generator for one simulated dataset.
pub fn replicate_rng(master_seed: u64, cell_n: usize, g: f64, replicate: u64) -> ChaCha8Rng {
    let key = derive_key(master_seed, Domain::Dataset, &[cell_n as u64, g.to_bits()]);
    stream_rng(key, replicate)
}
