//! Labelled random streams derived from one master seed.
//!
//! Every subsystem draws from its own ChaCha stream, selected by hashing a
//! fixed label. Adding a new label never shifts the numbers another label
//! sees, and the baseline and interfered halves of a run pair read identical
//! streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a, 64 bit. Stable across platforms and releases, which `DefaultHasher`
/// does not promise.
fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Deterministic stream for `label` under `seed`.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label_hash(label));
    rng
}

/// Stream for `label` within drop number `drop`.
pub fn drop_stream(seed: u64, label: &str, drop: u32) -> ChaCha8Rng {
    stream(seed, &format!("{label}/drop{drop}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_label_same_numbers() {
        let a: Vec<u64> = stream(7, "ues").random_iter().take(4).collect();
        let b: Vec<u64> = stream(7, "ues").random_iter().take(4).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn labels_are_independent() {
        let a: u64 = stream(7, "ues").random();
        let b: u64 = stream(7, "shadowing").random();
        let c: u64 = stream(8, "ues").random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        let d: u64 = drop_stream(7, "ues", 1).random();
        assert_ne!(a, d);
    }
}
