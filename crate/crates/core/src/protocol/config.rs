//! Session parameters and their validation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance when deciding whether n·γ is an integer.
const INTEGRALITY_TOLERANCE: f64 = 1e-9;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ConfigError {
    #[error("n must be at least 1")]
    ZeroLength,
    #[error("lambda and epsilon must be at least 1")]
    ZeroCheckParameter,
    #[error("gamma must be greater than 0, got {0}")]
    NonPositiveGamma(f64),
    #[error("n * gamma = {0} must be a positive integer")]
    NonIntegralGammaCount(f64),
    #[error("summation_rate_sigma must be greater than 0, got {0}")]
    NonPositiveSigma(f64),
    #[error("private input length {got} does not match n = {expected}")]
    InputLength { expected: usize, got: usize },
    #[error("not enough particles to check: need {need}, have {have}")]
    NotEnoughParticles { need: usize, have: usize },
    #[error("not enough groups to check: need {need}, have {have}")]
    NotEnoughGroups { need: usize, have: usize },
}

/// Abort thresholds for the three in-protocol checks.
///
/// The channels are ideal, so by default a single check error aborts, and
/// the summation-announcement count may fall at most `summation_rate_sigma`
/// binomial standard deviations below its honest expectation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbortThresholds {
    pub max_check_errors: usize,
    pub summation_rate_sigma: f64,
}

impl Default for AbortThresholds {
    fn default() -> Self {
        Self {
            max_check_errors: 0,
            summation_rate_sigma: 4.0,
        }
    }
}

/// Parameters of one protocol session.
///
/// Each channel carries n·(8+λ+ε+γ) particles: nλ are consumed by the
/// eavesdropping check, nε particle groups by the honesty check, and the
/// γ term is slack so that at least n usable groups remain. n·λ, n·ε and
/// n·γ must all be integers; choosing γ as a multiple of 8 additionally
/// makes the expected usable-group count n + nγ/8 integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    /// Private bit-string length.
    pub n: usize,
    /// Eavesdropping-check multiplier λ.
    pub lambda: u32,
    /// Honesty-check multiplier ε.
    pub epsilon: u32,
    /// Slack multiplier γ (any positive number with n·γ integral).
    pub gamma: f64,
    /// Session seed; all role streams derive from it.
    pub seed: u64,
    #[serde(default)]
    pub thresholds: AbortThresholds,
}

impl SessionConfig {
    pub fn new(n: usize, lambda: u32, epsilon: u32, gamma: f64, seed: u64) -> Self {
        Self {
            n,
            lambda,
            epsilon,
            gamma,
            seed,
            thresholds: AbortThresholds::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(ConfigError::ZeroLength);
        }
        if self.lambda == 0 || self.epsilon == 0 {
            return Err(ConfigError::ZeroCheckParameter);
        }
        if self.gamma <= 0.0 {
            return Err(ConfigError::NonPositiveGamma(self.gamma));
        }
        let ng = self.n as f64 * self.gamma;
        if (ng - ng.round()).abs() > INTEGRALITY_TOLERANCE || ng.round() < 1.0 {
            return Err(ConfigError::NonIntegralGammaCount(ng));
        }
        if self.thresholds.summation_rate_sigma <= 0.0 {
            return Err(ConfigError::NonPositiveSigma(
                self.thresholds.summation_rate_sigma,
            ));
        }
        Ok(())
    }

    /// n·γ as a count.
    pub fn gamma_count(&self) -> usize {
        (self.n as f64 * self.gamma).round() as usize
    }

    /// n·λ, the number of positions checked per channel in the
    /// eavesdropping check.
    pub fn eve_check_count(&self) -> usize {
        self.n * self.lambda as usize
    }

    /// n·ε, the number of groups consumed by the honesty check.
    pub fn honesty_check_count(&self) -> usize {
        self.n * self.epsilon as usize
    }

    /// n·(8+λ+ε+γ), the length of each of the two particle sequences.
    pub fn sequence_length(&self) -> usize {
        8 * self.n + self.eve_check_count() + self.honesty_check_count() + self.gamma_count()
    }

    /// n·(8+ε+γ), the number of particle groups formed after the
    /// eavesdropping check.
    pub fn group_count(&self) -> usize {
        self.sequence_length() - self.eve_check_count()
    }

    /// n·(8+γ), the groups remaining after the honesty check.
    pub fn remaining_group_count(&self) -> usize {
        self.group_count() - self.honesty_check_count()
    }

    /// Whether nγ/8 (and hence the expected usable-group count n + nγ/8)
    /// is an integer. Non-integral values are allowed; the count is an
    /// expectation either way.
    pub fn expected_groups_integral(&self) -> bool {
        self.gamma_count() % 8 == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_length_small_config() {
        // n=1, λ=1, ε=1, γ=2: each sequence has 1·(8+1+1+2) = 12 particles.
        let cfg = SessionConfig::new(1, 1, 1, 2.0, 0);
        cfg.validate().unwrap();
        assert_eq!(cfg.sequence_length(), 12);
    }

    #[test]
    fn sequence_length_default_style_config() {
        let cfg = SessionConfig::new(2, 2, 2, 8.0, 0);
        cfg.validate().unwrap();
        assert_eq!(cfg.sequence_length(), 40);
    }

    #[test]
    fn fractional_gamma_with_integral_product_is_accepted() {
        let cfg = SessionConfig::new(8, 2, 2, 0.5, 7);
        cfg.validate().unwrap();
        assert_eq!(cfg.gamma_count(), 4);
        assert_eq!(cfg.sequence_length(), 8 * 8 + 16 + 16 + 4);
        assert!(!cfg.expected_groups_integral());
    }

    #[test]
    fn non_integral_gamma_count_is_rejected() {
        let cfg = SessionConfig::new(3, 2, 2, 0.5, 0);
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::NonIntegralGammaCount(_))
        ));
    }

    #[test]
    fn zero_parameters_are_rejected() {
        assert!(SessionConfig::new(0, 1, 1, 1.0, 0).validate().is_err());
        assert!(SessionConfig::new(1, 0, 1, 1.0, 0).validate().is_err());
        assert!(SessionConfig::new(1, 1, 0, 1.0, 0).validate().is_err());
        assert!(SessionConfig::new(1, 1, 1, 0.0, 0).validate().is_err());
        assert!(SessionConfig::new(1, 1, 1, -2.0, 0).validate().is_err());
    }

    #[test]
    fn counting_identities() {
        let cfg = SessionConfig::new(8, 2, 2, 8.0, 0);
        assert_eq!(cfg.sequence_length(), 160);
        assert_eq!(cfg.group_count(), 144);
        assert_eq!(cfg.remaining_group_count(), 128);
        assert!(cfg.sequence_length() >= 8 * cfg.n + cfg.eve_check_count() + cfg.honesty_check_count() + 1);
    }
}
