//! Keyed random substreams.
//!
//! Every random draw in the crate comes from a generator addressed by a user
//! seed plus a key path such as `(purpose, class, index)`. Two different key
//! paths give independent ChaCha streams, so results do not depend on the
//! order or the thread in which samples are generated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for `key` under `seed`.
pub fn substream(seed: u64, key: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix(key));
    rng
}

/// SplitMix64 fold of the key path into one stream id.
fn mix(key: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15 ^ key.len() as u64;
    for &k in key {
        h = h.wrapping_add(k).wrapping_add(0x9E37_79B9_7F4A_7C15);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}
