//! Filter classification by spectral centroid and by LHFR, and the combined
//! verdict.
//!
//! Both rules send boundary values to band-pass. When the rules disagree, a
//! band-pass vote yields to the other rule with weak confidence; a low-pass vs
//! high-pass split is an outlier.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Lhfr, SpectralSummary, NYQUIST};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterClass {
    LowPass,
    BandPass,
    HighPass,
}

impl FilterClass {
    /// Position in the low → band → high order.
    pub fn rank(self) -> u8 {
        match self {
            FilterClass::LowPass => 0,
            FilterClass::BandPass => 1,
            FilterClass::HighPass => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FilterClass::LowPass => "low_pass",
            FilterClass::BandPass => "band_pass",
            FilterClass::HighPass => "high_pass",
        }
    }
}

impl fmt::Display for FilterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Combined verdict: a filter class, or an outlier when the rules conflict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    LowPass,
    BandPass,
    HighPass,
    Outlier,
}

impl Verdict {
    pub fn class(self) -> Option<FilterClass> {
        match self {
            Verdict::LowPass => Some(FilterClass::LowPass),
            Verdict::BandPass => Some(FilterClass::BandPass),
            Verdict::HighPass => Some(FilterClass::HighPass),
            Verdict::Outlier => None,
        }
    }
}

impl From<FilterClass> for Verdict {
    fn from(class: FilterClass) -> Self {
        match class {
            FilterClass::LowPass => Verdict::LowPass,
            FilterClass::BandPass => Verdict::BandPass,
            FilterClass::HighPass => Verdict::HighPass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.class() {
            Some(class) => class.fmt(f),
            None => f.write_str("outlier"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Agree,
    Weak,
    Outlier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Categorization {
    pub by_centroid: FilterClass,
    pub by_lhfr: FilterClass,
    pub combined: Verdict,
    pub confidence: Confidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub sc_low: f64,
    pub sc_high: f64,
    pub lhfr_low: f64,
    pub lhfr_high: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            sc_low: NYQUIST / 3.0,
            sc_high: 2.0 * NYQUIST / 3.0,
            lhfr_low: 1.0,
            lhfr_high: 10.0,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.sc_low > 0.0 && self.sc_low < self.sc_high && self.sc_high < NYQUIST) {
            return Err(Error::contract(format!(
                "centroid bounds must satisfy 0 < low < high < 0.5, got {} and {}",
                self.sc_low, self.sc_high
            )));
        }
        if !(self.lhfr_low > 0.0 && self.lhfr_low < self.lhfr_high && self.lhfr_high.is_finite()) {
            return Err(Error::contract(format!(
                "LHFR bounds must satisfy 0 < low < high, got {} and {}",
                self.lhfr_low, self.lhfr_high
            )));
        }
        Ok(())
    }
}

pub fn classify_by_centroid(sc: f64, thresholds: &Thresholds) -> Result<FilterClass> {
    if !(0.0..=NYQUIST).contains(&sc) {
        return Err(Error::contract(format!(
            "spectral centroid {sc} lies outside [0, 0.5]"
        )));
    }
    Ok(if sc < thresholds.sc_low {
        FilterClass::LowPass
    } else if sc > thresholds.sc_high {
        FilterClass::HighPass
    } else {
        FilterClass::BandPass
    })
}

pub fn classify_by_lhfr(ratio: Lhfr, thresholds: &Thresholds) -> Result<FilterClass> {
    let value = ratio.value();
    if value.is_nan() || value < 0.0 {
        return Err(Error::contract(format!("LHFR {value} is negative")));
    }
    Ok(if value > thresholds.lhfr_high {
        FilterClass::LowPass
    } else if value < thresholds.lhfr_low {
        FilterClass::HighPass
    } else {
        FilterClass::BandPass
    })
}

/// Resolves the two rule verdicts into one.
pub fn combine(by_centroid: FilterClass, by_lhfr: FilterClass) -> (Verdict, Confidence) {
    use FilterClass::*;
    match (by_centroid, by_lhfr) {
        (a, b) if a == b => (a.into(), Confidence::Agree),
        (BandPass, other) | (other, BandPass) => (other.into(), Confidence::Weak),
        _ => (Verdict::Outlier, Confidence::Outlier),
    }
}

pub fn categorize(summary: &SpectralSummary, thresholds: &Thresholds) -> Result<Categorization> {
    let by_centroid = classify_by_centroid(summary.centroid, thresholds)?;
    let by_lhfr = classify_by_lhfr(summary.lhfr, thresholds)?;
    let (combined, confidence) = combine(by_centroid, by_lhfr);
    Ok(Categorization {
        by_centroid,
        by_lhfr,
        combined,
        confidence,
    })
}
