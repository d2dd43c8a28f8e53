//! Folded-normal communication delays.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::model::DelaySpec;

/// `|X|` for `X ~ Normal(mu, sigma)`; exactly `|mu|` when `sigma == 0`.
pub fn sample_folded_normal<R: Rng + ?Sized>(params: DelaySpec, rng: &mut R) -> f64 {
    if params.sigma == 0.0 {
        return params.mu.abs();
    }
    let normal = Normal::new(params.mu, params.sigma).expect("sigma is finite and non-negative");
    normal.sample(rng).abs()
}

/// Closed-form mean of the folded normal distribution.
pub fn folded_normal_mean(mu: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return mu.abs();
    }
    let z = mu / sigma;
    sigma * (2.0 / std::f64::consts::PI).sqrt() * (-0.5 * z * z).exp()
        + mu * libm::erf(z / std::f64::consts::SQRT_2)
}

/// Closed-form variance: `mu^2 + sigma^2 - mean^2`.
pub fn folded_normal_variance(mu: f64, sigma: f64) -> f64 {
    let m = folded_normal_mean(mu, sigma);
    (mu * mu + sigma * sigma - m * m).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_mean(spec: DelaySpec, draws: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sum = 0.0;
        for _ in 0..draws {
            sum += sample_folded_normal(spec, &mut rng);
        }
        sum / draws as f64
    }

    #[test]
    fn degenerate_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_folded_normal(DelaySpec { mu: 0.188, sigma: 0.0 }, &mut rng), 0.188);
        assert_eq!(sample_folded_normal(DelaySpec { mu: -0.5, sigma: 0.0 }, &mut rng), 0.5);
        assert_eq!(folded_normal_mean(-0.5, 0.0), 0.5);
    }

    #[test]
    fn standard_half_normal_mean() {
        let analytic = folded_normal_mean(0.0, 1.0);
        assert!((analytic - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
        let mc = sample_mean(DelaySpec { mu: 0.0, sigma: 1.0 }, 1_000_000, 11);
        assert!((mc - 0.79788).abs() < 0.003, "mc mean {mc}");
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form() {
        let n = 1_000_000;
        for (i, (mu, sigma)) in [(0.188, 0.087), (0.188, 0.015), (0.187, 0.397), (0.367, 0.365)]
            .into_iter()
            .enumerate()
        {
            let analytic = folded_normal_mean(mu, sigma);
            let se = (folded_normal_variance(mu, sigma) / n as f64).sqrt();
            let mc = sample_mean(DelaySpec { mu, sigma }, n, 100 + i as u64);
            assert!(
                (mc - analytic).abs() <= 3.0 * se,
                "FN({mu},{sigma}): mc {mc} analytic {analytic} se {se}"
            );
        }
    }

    #[test]
    fn narrow_spread_is_nearly_mu() {
        // E->C delay of the measured testbed: mu/sigma > 12, folding is negligible
        let m = folded_normal_mean(0.188, 0.015);
        assert!((m - 0.188).abs() < 1e-12);
    }
}
