/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959964;

/// Wilson score interval for `errors` out of `trials` at `z`, clamped to
/// `[0, 1]`. Returns `(0, 1)` when `trials == 0`.
pub fn wilson_ci(errors: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors.min(trials) as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors >= trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        let (lo, hi) = wilson_ci(0, 100, Z_95);
        assert_eq!(lo, 0.0);
        assert_close!(hi, 0.0370, 5e-5);

        let (lo, hi) = wilson_ci(50, 100, Z_95);
        assert_close!(lo + hi, 1.0, 1e-12);
        assert_close!(hi - lo, 0.192, 5e-4);

        let (_, hi) = wilson_ci(100, 100, Z_95);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn single_trial() {
        let (lo, hi) = wilson_ci(0, 1, Z_95);
        assert!(lo == 0.0 && hi > 0.5 && hi < 1.0);
        let (lo, hi) = wilson_ci(1, 1, Z_95);
        assert!(lo > 0.0 && lo < 0.5 && hi == 1.0);
    }

    proptest! {
        #[test]
        fn rate_lies_inside_interval(trials in 1usize..5000, frac in 0.0f64..=1.0) {
            let errors = ((trials as f64) * frac).round() as usize;
            let (lo, hi) = wilson_ci(errors, trials, Z_95);
            let p = errors as f64 / trials as f64;
            prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
    }
}
