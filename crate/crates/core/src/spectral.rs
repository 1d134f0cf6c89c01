//! One-sided magnitude spectra of real kernels and the metrics derived from
//! them: spectral centroid, low/high band energies, their ratio (LHFR) and the
//! dominant frequency.
//!
//! Frequencies are normalized to a unit sample rate, so bin `n` of a length-`N`
//! kernel sits at `n / N` cycles per sample and the spectrum spans `[0, 0.5]`.
//! Magnitudes are raw `|X|` with no normalization, and every sum includes the
//! DC bin.

use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest representable normalized frequency.
pub const NYQUIST: f64 = 0.5;

/// Slack for band-edge comparisons so that bins landing exactly on an edge
/// are not lost to rounding in `n / N`.
const EDGE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Backward];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            other => Err(Error::contract(format!(
                "direction must be `forward` or `backward`, got `{other}`"
            ))),
        }
    }
}

/// A real time-domain convolution kernel with its position in a model.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    values: Vec<f64>,
    layer: u32,
    direction: Direction,
    kernel_index: u32,
    tag: String,
}

impl Kernel {
    pub fn new(
        values: Vec<f64>,
        layer: u32,
        direction: Direction,
        kernel_index: u32,
        tag: impl Into<String>,
    ) -> Result<Self> {
        check_samples(&values)?;
        if layer == 0 {
            return Err(Error::contract("layer numbers start at 1"));
        }
        Ok(Kernel {
            values,
            layer,
            direction,
            kernel_index,
            tag: tag.into(),
        })
    }

    /// A kernel at layer 1, forward, index 0.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Kernel::new(values, 1, Direction::Forward, 0, "")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn layer(&self) -> u32 {
        self.layer
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn kernel_index(&self) -> u32 {
        self.kernel_index
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn is_all_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Moves the kernel to another slot, keeping its weights.
    pub fn relabel(mut self, layer: u32, direction: Direction, kernel_index: u32) -> Result<Self> {
        if layer == 0 {
            return Err(Error::contract("layer numbers start at 1"));
        }
        self.layer = layer;
        self.direction = direction;
        self.kernel_index = kernel_index;
        Ok(self)
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| v * factor).collect();
        Kernel::new(
            values,
            self.layer,
            self.direction,
            self.kernel_index,
            self.tag.clone(),
        )
    }
}

fn check_samples(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::TooShort(values.len()));
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    Ok(())
}

/// One-sided magnitude spectrum: `floor(N/2) + 1` bins at `n / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    magnitudes: Vec<f64>,
    source_length: usize,
}

impl Spectrum {
    /// Builds a spectrum from precomputed magnitudes of a length-`source_length`
    /// transform.
    pub fn from_magnitudes(magnitudes: Vec<f64>, source_length: usize) -> Result<Self> {
        if source_length < 2 {
            return Err(Error::TooShort(source_length));
        }
        let expected = source_length / 2 + 1;
        if magnitudes.len() != expected {
            return Err(Error::LengthMismatch {
                left: magnitudes.len(),
                right: expected,
            });
        }
        if let Some((index, &value)) = magnitudes
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m >= 0.0))
        {
            return Err(Error::contract(format!(
                "magnitude {value} at bin {index} is not a finite nonnegative number"
            )));
        }
        Ok(Spectrum {
            magnitudes,
            source_length,
        })
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn source_length(&self) -> usize {
        self.source_length
    }

    pub fn bin_count(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn frequency(&self, bin: usize) -> f64 {
        bin as f64 / self.source_length as f64
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.bin_count()).map(|n| self.frequency(n))
    }

    /// `(frequency, magnitude)` pairs in increasing frequency.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.frequencies().zip(self.magnitudes.iter().copied())
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequency(self.bin_count() - 1)
    }

    pub fn total_magnitude(&self) -> f64 {
        self.magnitudes.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.magnitudes.iter().all(|&m| m == 0.0)
    }
}

/// Magnitude spectrum of a validated kernel.
pub fn compute_spectrum(kernel: &Kernel) -> Spectrum {
    fast_magnitudes(kernel.values())
}

/// Magnitude spectrum of raw samples, rejecting non-finite input.
pub fn magnitude_spectrum(values: &[f64]) -> Result<Spectrum> {
    check_samples(values)?;
    Ok(fast_magnitudes(values))
}

fn fast_magnitudes(values: &[f64]) -> Spectrum {
    let n = values.len();
    let mut buffer: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    fft.process(&mut buffer);
    let magnitudes = buffer[..n / 2 + 1].iter().map(|c| c.norm()).collect();
    Spectrum {
        magnitudes,
        source_length: n,
    }
}

/// Magnitude-weighted mean frequency.
pub fn spectral_centroid(spectrum: &Spectrum) -> Result<f64> {
    let total = spectrum.total_magnitude();
    if total <= 0.0 {
        return Err(Error::Degenerate(
            "all-zero spectrum has no centroid".into(),
        ));
    }
    let weighted: f64 = spectrum.bins().map(|(f, m)| f * m).sum();
    Ok((weighted / total).clamp(0.0, spectrum.max_frequency()))
}

/// Low and high band widths as fractions of the frequency range `[0, 0.5]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSplit {
    pub low_fraction: f64,
    pub high_fraction: f64,
}

impl Default for BandSplit {
    fn default() -> Self {
        BandSplit {
            low_fraction: 0.10,
            high_fraction: 0.40,
        }
    }
}

impl BandSplit {
    pub fn low_edge(&self) -> f64 {
        self.low_fraction * NYQUIST
    }

    pub fn high_edge(&self) -> f64 {
        (1.0 - self.high_fraction) * NYQUIST
    }

    pub fn in_low_band(&self, frequency: f64) -> bool {
        frequency <= self.low_edge() + EDGE_EPS
    }

    pub fn in_high_band(&self, frequency: f64) -> bool {
        frequency >= self.high_edge() - EDGE_EPS
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x < 1.0;
        if !ok(self.low_fraction) || !ok(self.high_fraction) {
            return Err(Error::contract(format!(
                "band fractions must lie in (0, 1), got {} and {}",
                self.low_fraction, self.high_fraction
            )));
        }
        if self.low_fraction + self.high_fraction > 1.0 {
            return Err(Error::contract("low and high bands overlap"));
        }
        Ok(())
    }
}

/// Summed magnitudes in the low band and the high band, edges inclusive.
pub fn band_energies(spectrum: &Spectrum, bands: &BandSplit) -> (f64, f64) {
    spectrum
        .bins()
        .fold((0.0, 0.0), |(low, high), (f, m)| {
            (
                if bands.in_low_band(f) { low + m } else { low },
                if bands.in_high_band(f) { high + m } else { high },
            )
        })
}

/// Low-to-high band energy ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lhfr {
    Finite(f64),
    /// High band is empty, low band is not.
    Infinite,
    /// Both tails are empty; treated as a ratio of 1.
    TailFree,
}

impl Lhfr {
    pub fn value(self) -> f64 {
        match self {
            Lhfr::Finite(r) => r,
            Lhfr::Infinite => f64::INFINITY,
            Lhfr::TailFree => 1.0,
        }
    }

    pub fn is_tail_free(self) -> bool {
        matches!(self, Lhfr::TailFree)
    }
}

impl Serialize for Lhfr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Lhfr::Infinite => serializer.serialize_str("infinite"),
            other => serializer.serialize_f64(other.value()),
        }
    }
}

pub fn lhfr(e_low: f64, e_high: f64) -> Result<Lhfr> {
    if !(e_low.is_finite() && e_high.is_finite() && e_low >= 0.0 && e_high >= 0.0) {
        return Err(Error::contract(format!(
            "band energies must be finite and nonnegative, got ({e_low}, {e_high})"
        )));
    }
    Ok(match (e_low > 0.0, e_high > 0.0) {
        (_, true) => Lhfr::Finite(e_low / e_high),
        (true, false) => Lhfr::Infinite,
        (false, false) => Lhfr::TailFree,
    })
}

/// Frequency of the largest bin; ties go to the lowest frequency.
pub fn dominant_frequency(spectrum: &Spectrum) -> f64 {
    let mut best = 0;
    for (n, &m) in spectrum.magnitudes.iter().enumerate().skip(1) {
        if m > spectrum.magnitudes[best] {
            best = n;
        }
    }
    spectrum.frequency(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub centroid: f64,
    pub e_low: f64,
    pub e_high: f64,
    pub lhfr: Lhfr,
    pub tail_free: bool,
    pub dominant_frequency: f64,
    pub total_magnitude: f64,
}

/// All metrics for one spectrum. Fails on an all-zero spectrum.
pub fn summarize(spectrum: &Spectrum, bands: &BandSplit) -> Result<SpectralSummary> {
    let total_magnitude = spectrum.total_magnitude();
    let centroid = spectral_centroid(spectrum)?;
    let (e_low, e_high) = band_energies(spectrum, bands);
    let ratio = lhfr(e_low, e_high)?;
    Ok(SpectralSummary {
        centroid,
        e_low,
        e_high,
        lhfr: ratio,
        tail_free: ratio.is_tail_free(),
        dominant_frequency: dominant_frequency(spectrum),
        total_magnitude,
    })
}
