//! Named deterministic random streams derived from one master seed.
//!
//! Every subsystem that consumes randomness gets its own ChaCha stream keyed
//! by `(master seed, stream name)`, so disabling an impairment never shifts
//! the draws of another one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const CHANNEL_NOISE: &str = "channel.noise";
pub const CHANNEL_FADE: &str = "channel.fade";
pub const STRATEGY: &str = "strategy";

/// 64-bit FNV-1a; stable across platforms and compiler versions.
fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, name: &str) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name));
    rng
}
