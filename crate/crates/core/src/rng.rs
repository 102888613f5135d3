//! Seeded random streams.
//!
//! A stream is identified by `(seed, cell, replicate, purpose)`. The first
//! three words form the 256-bit ChaCha20 key (little-endian, last word zero)
//! and the purpose selects the ChaCha stream id. Any replicate can therefore
//! be regenerated on its own, independent of scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// What a stream is used for; distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Gaps = 0,
    Innovations = 1,
}

pub fn stream(seed: u64, cell: u64, replicate: u64, purpose: Purpose) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&cell.to_le_bytes());
    key[16..24].copy_from_slice(&replicate.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(purpose as u64);
    rng
}
