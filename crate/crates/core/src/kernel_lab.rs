//! Kernel sources: materialization from diagonal state-space parameters and
//! windowed-sinc reference filters, plus the spectrum of a forward/backward
//! product.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classify::FilterClass;
use crate::error::{Error, Result};
use crate::spectral::{compute_spectrum, Kernel, Spectrum, NYQUIST};

/// One diagonal mode: a continuous-time pole and its output coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub pole: Complex64,
    pub coefficient: Complex64,
}

/// Diagonal state-space parameters of one kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct S4DParams {
    modes: Vec<Mode>,
    step: f64,
}

impl S4DParams {
    pub fn new(modes: Vec<Mode>, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::contract(format!(
                "discretization step must be positive, got {step}"
            )));
        }
        for (mode, m) in modes.iter().enumerate() {
            let finite = m.pole.re.is_finite()
                && m.pole.im.is_finite()
                && m.coefficient.re.is_finite()
                && m.coefficient.im.is_finite();
            if !finite {
                return Err(Error::contract(format!("mode {mode} has non-finite parameters")));
            }
            if m.pole.re >= 0.0 {
                return Err(Error::Unstable {
                    mode,
                    real: m.pole.re,
                });
            }
        }
        Ok(S4DParams { modes, step })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn state_size(&self) -> usize {
        self.modes.len()
    }
}

/// Zero-order-hold discretization of one mode: `(exp(Δa), (exp(Δa) - 1) / a)`.
pub fn discretize(pole: Complex64, step: f64) -> (Complex64, Complex64) {
    let decay = (pole * step).exp();
    let input = (decay - 1.0) / pole;
    (decay, input)
}

/// `K[l] = Re(Σ c · b̄ · ā^l)` for `l = 0..length`, with `ā^l` evaluated as
/// `exp(l · Δ · a)`.
pub fn materialize_s4d(params: &S4DParams, length: usize) -> Result<Kernel> {
    if length < 2 {
        return Err(Error::TooShort(length));
    }
    let mut values = vec![0.0; length];
    for mode in &params.modes {
        let (_, input) = discretize(mode.pole, params.step);
        let weight = mode.coefficient * input;
        let rate = mode.pole * params.step;
        for (l, value) in values.iter_mut().enumerate() {
            *value += (weight * (rate * l as f64).exp()).re;
        }
    }
    Kernel::from_values(values).map(|k| k.with_tag("s4d"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Hamming,
    Rectangular,
}

impl Window {
    fn weight(self, n: usize, len: usize) -> f64 {
        match self {
            Window::Rectangular => 1.0,
            Window::Hamming => 0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos(),
        }
    }
}

/// Target class and geometry of a reference filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub target: FilterClass,
    /// Cutoff of a low- or high-pass, or the lower edge of a band-pass.
    pub cutoff_low: f64,
    /// Upper edge of a band-pass; ignored otherwise.
    pub cutoff_high: Option<f64>,
    pub length: usize,
    pub window: Window,
}

impl SynthSpec {
    pub fn low_pass(cutoff: f64, length: usize) -> Self {
        SynthSpec {
            target: FilterClass::LowPass,
            cutoff_low: cutoff,
            cutoff_high: None,
            length,
            window: Window::Hamming,
        }
    }

    pub fn high_pass(cutoff: f64, length: usize) -> Self {
        SynthSpec {
            target: FilterClass::HighPass,
            ..SynthSpec::low_pass(cutoff, length)
        }
    }

    pub fn band_pass(low: f64, high: f64, length: usize) -> Self {
        SynthSpec {
            target: FilterClass::BandPass,
            cutoff_low: low,
            cutoff_high: Some(high),
            length,
            window: Window::Hamming,
        }
    }

    pub fn with_window(self, window: Window) -> Self {
        SynthSpec { window, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.length < 16 {
            return Err(Error::contract(format!(
                "reference filters need at least 16 taps, got {}",
                self.length
            )));
        }
        let in_range = |f: f64| f > 0.0 && f < NYQUIST;
        if !in_range(self.cutoff_low) {
            return Err(Error::contract(format!(
                "cutoff {} lies outside (0, 0.5)",
                self.cutoff_low
            )));
        }
        if self.target == FilterClass::BandPass {
            let high = self
                .cutoff_high
                .ok_or_else(|| Error::contract("band-pass needs an upper cutoff"))?;
            if !in_range(high) {
                return Err(Error::contract(format!("cutoff {high} lies outside (0, 0.5)")));
            }
            if high <= self.cutoff_low {
                return Err(Error::contract(format!(
                    "band-pass edges must increase, got {} and {high}",
                    self.cutoff_low
                )));
            }
        }
        Ok(())
    }
}

/// Unit-DC-gain windowed sinc over `taps` samples centered at `(taps - 1) / 2`.
fn windowed_sinc(cutoff: f64, taps: usize, window: Window) -> Vec<f64> {
    let center = (taps - 1) as f64 / 2.0;
    let mut h: Vec<f64> = (0..taps)
        .map(|n| {
            let t = n as f64 - center;
            let ideal = if t == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * PI * cutoff * t).sin() / (PI * t)
            };
            ideal * window.weight(n, taps)
        })
        .collect();
    let gain: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= gain);
    h
}

/// Windowed-sinc reference kernel.
///
/// The filter has an odd number of taps so that it has a center sample; for
/// even `length` the final sample is zero.
pub fn synth_kernel(spec: &SynthSpec) -> Result<Kernel> {
    spec.validate()?;
    let taps = if spec.length % 2 == 1 {
        spec.length
    } else {
        spec.length - 1
    };
    let center = (taps - 1) / 2;
    let mut taps_out = match spec.target {
        FilterClass::LowPass => windowed_sinc(spec.cutoff_low, taps, spec.window),
        FilterClass::HighPass => {
            let mut h = windowed_sinc(spec.cutoff_low, taps, spec.window);
            h.iter_mut().for_each(|v| *v = -*v);
            h[center] += 1.0;
            h
        }
        FilterClass::BandPass => {
            let upper = windowed_sinc(spec.cutoff_high.unwrap_or_default(), taps, spec.window);
            let lower = windowed_sinc(spec.cutoff_low, taps, spec.window);
            upper.iter().zip(&lower).map(|(u, l)| u - l).collect()
        }
    };
    taps_out.resize(spec.length, 0.0);
    Kernel::from_values(taps_out).map(|k| k.with_tag(format!("synth-{}", spec.target)))
}

/// Spectrum of the time-domain product of two directional kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedSpectrum {
    pub spectrum: Spectrum,
    /// Set when the product is identically zero.
    pub degenerate: bool,
}

pub fn compose_elementwise(forward: &Kernel, backward: &Kernel) -> Result<ComposedSpectrum> {
    if forward.len() != backward.len() {
        return Err(Error::LengthMismatch {
            left: forward.len(),
            right: backward.len(),
        });
    }
    let product: Vec<f64> = forward
        .values()
        .iter()
        .zip(backward.values())
        .map(|(f, b)| f * b)
        .collect();
    let kernel = Kernel::from_values(product)?;
    let degenerate = kernel.is_all_zero();
    Ok(ComposedSpectrum {
        spectrum: compute_spectrum(&kernel),
        degenerate,
    })
}
