//! Diagonal state-space parameter files.
//!
//! ```json
//! {
//!   "model_tag": "codessm",
//!   "kernels": [
//!     { "layer": 1, "direction": "forward", "kernel_index": 0, "step": 0.01,
//!       "modes": [ { "pole": [-0.5, 3.14], "coefficient": [1.0, 0.0] } ] }
//!   ]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::KernelBundle;
use crate::error::{Error, Result};
use crate::kernel_lab::{materialize_s4d, Mode, S4DParams};
use crate::spectral::Direction;

use super::read_text;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub pole: [f64; 2],
    pub coefficient: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelParams {
    pub layer: u32,
    pub direction: Direction,
    pub kernel_index: u32,
    pub step: f64,
    pub modes: Vec<ModeEntry>,
}

impl KernelParams {
    pub fn to_s4d(&self) -> Result<S4DParams> {
        let modes = self
            .modes
            .iter()
            .map(|m| Mode {
                pole: Complex64::new(m.pole[0], m.pole[1]),
                coefficient: Complex64::new(m.coefficient[0], m.coefficient[1]),
            })
            .collect();
        S4DParams::new(modes, self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub model_tag: String,
    pub kernels: Vec<KernelParams>,
}

impl ParamsFile {
    /// Materializes every kernel at `length` samples.
    pub fn materialize(&self, length: usize) -> Result<KernelBundle> {
        let kernels = self
            .kernels
            .iter()
            .map(|p| {
                let place = |e: Error| {
                    Error::contract(format!(
                        "layer {} {} index {}: {e}",
                        p.layer, p.direction, p.kernel_index
                    ))
                };
                let params = p.to_s4d().map_err(place)?;
                materialize_s4d(&params, length)?
                    .relabel(p.layer, p.direction, p.kernel_index)
                    .map(|k| k.with_tag(self.model_tag.clone()))
                    .map_err(place)
            })
            .collect::<Result<Vec<_>>>()?;
        KernelBundle::from_kernels(self.model_tag.clone(), kernels)
    }
}

pub fn read_params(path: &Path) -> Result<ParamsFile> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Error::format(path, format!("malformed parameter file: {e}")))
}
