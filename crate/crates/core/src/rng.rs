//! Counter-based deterministic random numbers.
//!
//! Values are a pure function of their key, so any parallel schedule produces
//! the same streams on every platform.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a key tuple into 64 bits.
pub fn counter_u64(key: &[u64]) -> u64 {
    key.iter()
        .fold(GOLDEN, |h, &k| mix64(h ^ k.wrapping_add(GOLDEN)))
}

/// Uniform in `[0, 1)` with 53 bits of resolution.
pub fn counter_uniform(key: &[u64]) -> f64 {
    (counter_u64(key) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_and_spread() {
        assert_eq!(counter_u64(&[1, 2, 3]), counter_u64(&[1, 2, 3]));
        assert_ne!(counter_u64(&[1, 2, 3]), counter_u64(&[1, 3, 2]));
        let mean: f64 = (0..10_000u64).map(|i| counter_uniform(&[7, i])).sum::<f64>() / 1e4;
        assert!((mean - 0.5).abs() < 0.02);
        assert!((0..1000u64).all(|i| (0.0..1.0).contains(&counter_uniform(&[i]))));
    }
}
