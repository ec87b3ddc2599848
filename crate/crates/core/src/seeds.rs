//! Stable seed derivation for parallel, reproducible trials.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xCBF2_9CE4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Mixes `(master, tag, index)` into a 64-bit seed. Stable across platforms
/// and releases; distinct tags give independent streams.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    let a = splitmix64(master ^ fnv1a(tag.as_bytes()));
    splitmix64(a ^ splitmix64(index.wrapping_mul(GOLDEN)))
}
