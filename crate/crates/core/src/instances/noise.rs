use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Zero-mean reward noise supported on `[−1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// `Unif[−1, 1]`.
    #[default]
    Uniform,
    /// `±1` with equal probability.
    Rademacher,
    /// `N(0, σ²)` conditioned on `[−1, 1]`; `σ = 0` gives no noise.
    TruncatedGaussian { sigma: f64 },
}

impl NoiseModel {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::Uniform => rng.random_range(-1.0..=1.0),
            NoiseModel::Rademacher => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            NoiseModel::TruncatedGaussian { sigma } => {
                if !(sigma > 0.0) {
                    return 0.0;
                }
                let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
                loop {
                    let e: f64 = normal.sample(rng);
                    if (-1.0..=1.0).contains(&e) {
                        return e;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bounded_and_centered() {
        let models = [
            NoiseModel::Uniform,
            NoiseModel::Rademacher,
            NoiseModel::TruncatedGaussian { sigma: 0.7 },
        ];
        for model in models {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let n = 1_000_000;
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..n {
                let e = model.sample(&mut rng);
                assert!((-1.0..=1.0).contains(&e));
                sum += e;
                sq += e * e;
            }
            let mean = sum / n as f64;
            let stderr = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
            assert!(mean.abs() <= 4.0 * stderr, "{model:?}: mean {mean}, stderr {stderr}");
        }
    }

    #[test]
    fn zero_sigma_is_silent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(NoiseModel::TruncatedGaussian { sigma: 0.0 }.sample(&mut rng), 0.0);
    }
}
