//! Decibel / linear conversions. Every dB <-> ratio conversion in the crate
//! goes through this pair.

/// Power ratio in dB to a linear ratio.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB. Non-positive ratios map to `-inf`.
#[inline]
pub fn linear_to_db(ratio: f64) -> f64 {
    if ratio <= 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * ratio.log10()
    }
}
