//! Monte Carlo check of when a correlated side measurement helps an attacker.
//!
//! Ground truth is `m = h = 0`. The attacker sees a unit-scale measurement of
//! `h` correlated with the measurement error of `m` (correlation `rho`), plus
//! extra noise of scale `sigma_h / sigma_m`. It regresses the `m` measurement
//! on the `h` channel when `rho` exceeds [`detection_threshold`], and keeps
//! the `m` measurement alone otherwise.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::LabError;

/// Fewest trials accepted by [`gaussian_threshold_demo`].
pub const MIN_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDemoParams {
    pub rho: f64,
    pub sigma_m: f64,
    pub sigma_h: f64,
    /// Scale between the two quantities, `m = beta * h`.
    pub beta: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDemoResult {
    pub rho: f64,
    pub sigma_m: f64,
    pub sigma_h: f64,
    pub beta: f64,
    pub trials: u64,
    /// Mean squared error of the attacker's estimate over `sigma_m^2`.
    pub var_ratio: f64,
    /// One Monte Carlo standard error of `var_ratio`.
    pub std_error: f64,
    pub threshold: f64,
    pub uses_side_channel: bool,
}

/// `1/sqrt(2) + sigma * sigma_m / (2 (sigma^2 + sigma_m^2))` with `sigma = beta * sigma_h`.
pub fn detection_threshold(sigma_m: f64, sigma_h: f64, beta: f64) -> f64 {
    let sigma = beta * sigma_h;
    core::f64::consts::FRAC_1_SQRT_2 + 0.5 * sigma * sigma_m / (sigma * sigma + sigma_m * sigma_m)
}

/// Expected `var_ratio` for the given parameters, without sampling.
pub fn closed_form_var_ratio(rho: f64, sigma_m: f64, sigma_h: f64, beta: f64) -> f64 {
    if rho > detection_threshold(sigma_m, sigma_h, beta) {
        1.0 - rho * rho / (1.0 + (sigma_h * sigma_h) / (sigma_m * sigma_m))
    } else {
        1.0
    }
}

impl GaussianDemoParams {
    pub fn validate(&self) -> Result<(), LabError> {
        let finite = [self.rho, self.sigma_m, self.sigma_h, self.beta]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(0.0..=1.0).contains(&self.rho) {
            return Err(LabError::InvalidParameter("rho must lie in [0, 1]"));
        }
        if !(self.sigma_h >= 0.0 && self.sigma_m > self.sigma_h) {
            return Err(LabError::InvalidParameter("need sigma_m > sigma_h >= 0"));
        }
        if self.beta <= 0.0 {
            return Err(LabError::InvalidParameter("beta must be positive"));
        }
        if self.trials < MIN_TRIALS {
            return Err(LabError::InvalidParameter("trials must be at least 10000"));
        }
        Ok(())
    }
}

pub fn gaussian_threshold_demo<R: RngCore + ?Sized>(
    params: &GaussianDemoParams,
    rng: &mut R,
) -> Result<GaussianDemoResult, LabError> {
    params.validate()?;
    let GaussianDemoParams {
        rho,
        sigma_m,
        sigma_h,
        beta,
        trials,
    } = *params;
    let threshold = detection_threshold(sigma_m, sigma_h, beta);
    let uses_side_channel = rho > threshold;
    let spread = libm::sqrt(1.0 - rho * rho);
    let noise = sigma_h / sigma_m;

    // Sums for the least-squares fit through the origin (truth is zero).
    let (mut mm, mut ms, mut ss) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        let w: f64 = StandardNormal.sample(rng);
        let m_hat = sigma_m * z1;
        let side = rho * z1 + spread * z2 + noise * w;
        mm += m_hat * m_hat;
        ms += m_hat * side;
        ss += side * side;
    }
    let residual = if uses_side_channel && ss > 0.0 {
        (mm - ms * ms / ss).max(0.0)
    } else {
        mm
    };
    let var_ratio = residual / (trials as f64 * sigma_m * sigma_m);
    Ok(GaussianDemoResult {
        rho,
        sigma_m,
        sigma_h,
        beta,
        trials,
        var_ratio,
        std_error: var_ratio * libm::sqrt(2.0 / trials as f64),
        threshold,
        uses_side_channel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(rho: f64, sigma_h: f64, trials: u64) -> GaussianDemoParams {
        GaussianDemoParams {
            rho,
            sigma_m: 1.0,
            sigma_h,
            beta: 1.0,
            trials,
        }
    }

    // With sigma_h = 0 the side channel is x = rho z1 + sqrt(1 - rho^2) z2, and
    // the best linear predictor of sigma_m z1 from x leaves variance
    // sigma_m^2 (1 - rho^2). The bracket of the threshold reduces to the sign
    // of rho^2 - 1/2.
    fn oracle(rho: f64) -> f64 {
        if rho * rho > 0.5 {
            1.0 - rho * rho
        } else {
            1.0
        }
    }

    #[test]
    fn independent_side_channel_gives_no_gain() {
        let r = gaussian_threshold_demo(
            &params(0.0, 0.0, 200_000),
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert!(!r.uses_side_channel);
        assert!((r.var_ratio - 1.0).abs() < 3.0 * r.std_error, "{r:?}");
    }

    #[test]
    fn strong_correlation_reduces_variance() {
        let r = gaussian_threshold_demo(
            &params(0.9, 0.0, 100_000),
            &mut ChaCha8Rng::seed_from_u64(2),
        )
        .unwrap();
        assert!(r.uses_side_channel);
        assert!(r.var_ratio < 1.0);
        assert!(
            (r.var_ratio - oracle(0.9)).abs() / oracle(0.9) < 0.02,
            "{r:?}"
        );
    }

    #[test]
    fn weak_correlation_is_ignored() {
        let r = gaussian_threshold_demo(
            &params(0.5, 0.0, 100_000),
            &mut ChaCha8Rng::seed_from_u64(3),
        )
        .unwrap();
        assert!(!r.uses_side_channel);
        assert!((r.var_ratio - oracle(0.5)).abs() < 3.0 * r.std_error);
    }

    #[test]
    fn threshold_without_side_noise_is_one_over_root_two() {
        assert_eq!(
            detection_threshold(2.0, 0.0, 3.0),
            core::f64::consts::FRAC_1_SQRT_2
        );
        for rho in [0.0, 0.3, 0.7, 0.71, 0.8, 1.0] {
            assert!((closed_form_var_ratio(rho, 1.0, 0.0, 1.0) - oracle(rho)).abs() < 1e-12);
        }
        assert!(detection_threshold(1.0, 0.5, 1.0) > core::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn side_noise_matches_closed_form() {
        let p = GaussianDemoParams {
            rho: 0.95,
            sigma_m: 2.0,
            sigma_h: 0.5,
            beta: 1.0,
            trials: 200_000,
        };
        let r = gaussian_threshold_demo(&p, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let expected = closed_form_var_ratio(0.95, 2.0, 0.5, 1.0);
        assert!(r.uses_side_channel);
        assert!(
            (r.var_ratio - expected).abs() < 4.0 * r.std_error,
            "{} vs {expected}",
            r.var_ratio
        );
    }

    #[test]
    fn rejects_invalid_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for bad in [
            params(1.5, 0.0, 10_000),
            params(-0.1, 0.0, 10_000),
            params(f64::NAN, 0.0, 10_000),
            params(0.5, 1.0, 10_000),
            params(0.5, -0.1, 10_000),
            params(0.5, 0.0, 9_999),
            GaussianDemoParams {
                beta: 0.0,
                ..params(0.5, 0.0, 10_000)
            },
        ] {
            assert!(gaussian_threshold_demo(&bad, &mut rng).is_err(), "{bad:?}");
        }
    }
}
