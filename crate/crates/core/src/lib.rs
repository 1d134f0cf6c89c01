//! Frequency-domain analysis of state space model convolution kernels, and
//! classifier-free probing of hidden representations by constrained
//! clustering.
//!
//! The pipeline runs kernel values through [`spectral`] metrics into the
//! [`classify`] rules, and [`analysis`] aggregates those per layer and across
//! checkpoints. [`kernel_lab`] produces kernels from state-space parameters
//! or as reference filters. [`probe`] clusters labeled vectors under a
//! convex-hull separability constraint. [`io`] holds the file formats and
//! [`cli`] the command-line front end.

pub mod analysis;
pub mod classify;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod kernel_lab;
pub mod probe;
pub mod spectral;

pub use analysis::{
    analyze_bundle, analyze_redundancy, detect_complementary, diff_bundles, Complementarity,
    KernelBundle,
};
pub use classify::{categorize, classify_by_centroid, classify_by_lhfr, Categorization, Confidence, FilterClass, Thresholds, Verdict};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use kernel_lab::{materialize_s4d, synth_kernel, Mode, S4DParams, SynthSpec, Window};
pub use probe::{evaluate, predict, run_directprobe, LabeledPoint, ProbeConfig, ProbeResult};
pub use spectral::{compute_spectrum, summarize, BandSplit, Direction, Kernel, Lhfr, Spectrum};
