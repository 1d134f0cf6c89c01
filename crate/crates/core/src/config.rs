//! Run-wide thresholds.
//!
//! Every field overrides exactly one constant of the pipeline. The defaults
//! reproduce the published centroid and LHFR rules. A JSON file with the same
//! field names (any subset) can be loaded with [`RunConfig::from_json`].

use serde::{Deserialize, Serialize};

use crate::classify::Thresholds;
use crate::error::{Error, Result};
use crate::spectral::BandSplit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Centroid below this is low-pass.
    pub sc_low: f64,
    /// Centroid above this is high-pass.
    pub sc_high: f64,
    /// LHFR below this is high-pass.
    pub lhfr_low: f64,
    /// LHFR above this is low-pass.
    pub lhfr_high: f64,
    /// Width of the low band as a fraction of [0, 0.5].
    pub low_band_fraction: f64,
    /// Width of the high band as a fraction of [0, 0.5].
    pub high_band_fraction: f64,
    /// Centroid increase that counts as a spectral shift.
    pub shift_tau: f64,
    /// Spectral cosine at or above which two kernels are redundant.
    pub redundancy_cutoff: f64,
    /// Minimum hull distance that still counts as separable.
    pub separability_tolerance: f64,
    /// Merge attempts allowed per n² points before a probe run is abandoned.
    pub merge_budget_factor: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let thresholds = Thresholds::default();
        let bands = BandSplit::default();
        RunConfig {
            sc_low: thresholds.sc_low,
            sc_high: thresholds.sc_high,
            lhfr_low: thresholds.lhfr_low,
            lhfr_high: thresholds.lhfr_high,
            low_band_fraction: bands.low_fraction,
            high_band_fraction: bands.high_fraction,
            shift_tau: 0.05,
            redundancy_cutoff: 0.95,
            separability_tolerance: 1e-6,
            merge_budget_factor: 10,
        }
    }
}

impl RunConfig {
    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            sc_low: self.sc_low,
            sc_high: self.sc_high,
            lhfr_low: self.lhfr_low,
            lhfr_high: self.lhfr_high,
        }
    }

    pub fn bands(&self) -> BandSplit {
        BandSplit {
            low_fraction: self.low_band_fraction,
            high_fraction: self.high_band_fraction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.thresholds().validate()?;
        self.bands().validate()?;
        if !(self.shift_tau.is_finite() && self.shift_tau >= 0.0) {
            return Err(Error::contract(format!(
                "shift_tau must be a nonnegative number, got {}",
                self.shift_tau
            )));
        }
        if !(self.redundancy_cutoff > 0.0 && self.redundancy_cutoff <= 1.0) {
            return Err(Error::contract(format!(
                "redundancy_cutoff must lie in (0, 1], got {}",
                self.redundancy_cutoff
            )));
        }
        if !(self.separability_tolerance.is_finite() && self.separability_tolerance > 0.0) {
            return Err(Error::contract(format!(
                "separability_tolerance must be positive, got {}",
                self.separability_tolerance
            )));
        }
        if self.merge_budget_factor == 0 {
            return Err(Error::contract("merge_budget_factor must be at least 1"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::contract(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
        assert_eq!(RunConfig::default().sc_low, 1.0 / 6.0);
        assert_eq!(RunConfig::default().sc_high, 1.0 / 3.0);
    }

    #[test]
    fn partial_json_overrides_one_field() {
        let config = RunConfig::from_json(r#"{ "lhfr_high": 20.0 }"#).unwrap();
        let expected = RunConfig {
            lhfr_high: 20.0,
            ..RunConfig::default()
        };
        assert_eq!(config, expected);
    }

    #[test]
    fn rejects_unknown_and_inverted() {
        assert!(RunConfig::from_json(r#"{ "sc_lo": 0.1 }"#).is_err());
        assert!(RunConfig::from_json(r#"{ "sc_low": 0.4, "sc_high": 0.2 }"#).is_err());
        assert!(RunConfig::from_json(r#"{ "lhfr_low": 0.0 }"#).is_err());
        assert!(RunConfig::from_json(r#"{ "low_band_fraction": 0.7 }"#).is_err());
    }
}
