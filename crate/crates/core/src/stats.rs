//! Shared statistical helpers for Monte-Carlo checks.

/// Half-width of a two-sided Hoeffding confidence interval for a mean of
/// `trials` observations in `[0,1]`, at confidence `1 - 1e-6`:
/// `sqrt(ln(2*10^6) / (2*trials))`. Every closeness test in the crate passes
/// iff the measured value is at most `tolerance + 3 * radius`.
pub fn hoeffding_radius(trials: u64) -> f64 {
    assert!(trials > 0, "radius of zero trials");
    ((2.0e6f64).ln() / (2.0 * trials as f64)).sqrt()
}

/// Same interval for observations spanning `range` instead of `[0,1]`.
pub fn hoeffding_radius_scaled(trials: u64, range: f64) -> f64 {
    assert!(range > 0.0, "empty observation range");
    hoeffding_radius(trials) * range
}

/// True iff the sequence never rises by more than `slack` between
/// consecutive entries. Decay ladders are noisy, so exact monotonicity is
/// not required; `slack` is normally a multiple of the sampling radius.
pub fn nonincreasing_within(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + slack)
}
