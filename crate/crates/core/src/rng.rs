use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent deterministic stream for `(seed, stream, index)`.
pub(crate) fn stream(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let k = splitmix(splitmix(splitmix(seed) ^ stream) ^ index);
    ChaCha8Rng::seed_from_u64(k)
}

pub(crate) const SAMPLING: u64 = 1;
pub(crate) const IMMERSION: u64 = 2;
pub(crate) const INJECTIVITY: u64 = 3;
pub(crate) const CHECKS: u64 = 4;
