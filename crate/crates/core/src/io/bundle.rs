//! Kernel bundle directories.
//!
//! ```text
//! DIR/manifest.json
//! DIR/layer001_forward_0.f32
//! DIR/layer001_backward_0.f32
//! ...
//! ```
//!
//! The manifest lists every kernel with its layer, direction, kernel index,
//! payload path (relative to `DIR`) and element count. Each payload holds
//! exactly `N` little-endian `f32` values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::KernelBundle;
use crate::error::{Error, Result};
use crate::spectral::{Direction, Kernel};

use super::{atomic_write, create_dir, decode_f32, encode_f32, read_file, read_text, resolve_relative};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleManifest {
    pub model_tag: String,
    #[serde(rename = "N")]
    pub length: usize,
    pub layer_count: usize,
    pub kernels: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub layer: u32,
    pub direction: Direction,
    pub kernel_index: u32,
    pub path: String,
    pub element_count: usize,
}

impl ManifestEntry {
    fn describe(&self) -> String {
        format!(
            "entry layer {} {} index {} ({})",
            self.layer, self.direction, self.kernel_index, self.path
        )
    }
}

pub fn payload_name(layer: u32, direction: Direction, kernel_index: u32) -> String {
    format!("layer{layer:03}_{direction}_{kernel_index}.f32")
}

pub fn read_bundle(dir: &Path) -> Result<KernelBundle> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest: BundleManifest = serde_json::from_str(&read_text(&manifest_path)?)
        .map_err(|e| Error::format(&manifest_path, format!("malformed manifest: {e}")))?;

    let mut kernels = Vec::with_capacity(manifest.kernels.len());
    for entry in &manifest.kernels {
        if entry.element_count != manifest.length {
            return Err(Error::format(
                &manifest_path,
                format!(
                    "{} declares {} elements but N is {}",
                    entry.describe(),
                    entry.element_count,
                    manifest.length
                ),
            ));
        }
        let payload = resolve_relative(dir, &manifest_path, &entry.path)?;
        let bytes = read_file(&payload)?;
        let expected = entry.element_count * 4;
        if bytes.len() != expected {
            return Err(Error::format(
                &payload,
                format!(
                    "size mismatch for {}: expected {expected} bytes ({} floats), found {} bytes",
                    entry.describe(),
                    entry.element_count,
                    bytes.len()
                ),
            ));
        }
        let values = decode_f32(&payload, &bytes)?;
        let kernel = Kernel::new(
            values,
            entry.layer,
            entry.direction,
            entry.kernel_index,
            manifest.model_tag.clone(),
        )
        .map_err(|e| Error::format(&payload, e.to_string()))?;
        kernels.push(kernel);
    }

    let bundle = KernelBundle::from_kernels(manifest.model_tag.clone(), kernels)
        .map_err(|e| Error::format(&manifest_path, e.to_string()))?;
    if bundle.layer_count() != manifest.layer_count {
        return Err(Error::format(
            &manifest_path,
            format!(
                "layer_count is {} but kernels cover {} layers",
                manifest.layer_count,
                bundle.layer_count()
            ),
        ));
    }
    Ok(bundle)
}

/// Manifest describing `bundle` with the default payload names.
pub fn manifest_for(bundle: &KernelBundle) -> BundleManifest {
    BundleManifest {
        model_tag: bundle.model_tag().to_string(),
        length: bundle.length(),
        layer_count: bundle.layer_count(),
        kernels: bundle
            .kernels()
            .map(|k| ManifestEntry {
                layer: k.layer(),
                direction: k.direction(),
                kernel_index: k.kernel_index(),
                path: payload_name(k.layer(), k.direction(), k.kernel_index()),
                element_count: k.len(),
            })
            .collect(),
    }
}

/// Writes payloads narrowed to `f32`, then the manifest.
pub fn write_bundle(bundle: &KernelBundle, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    let manifest = manifest_for(bundle);
    for (kernel, entry) in bundle.kernels().zip(&manifest.kernels) {
        let bytes = encode_f32(kernel.values())?;
        atomic_write(&dir.join(&entry.path), &bytes)?;
    }
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Internal(format!("manifest serialization failed: {e}")))?;
    text.push('\n');
    atomic_write(&dir.join(MANIFEST_FILE), text.as_bytes())
}
