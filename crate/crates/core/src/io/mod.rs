//! On-disk formats, reports and plots.
//!
//! Binary payloads are raw little-endian `f32` with no header; metadata lives
//! in a JSON manifest next to them. All writers replace their destination
//! atomically.

pub mod bundle;
pub mod dataset;
pub mod params;
pub mod plot;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Component, Path, PathBuf};

use crate::error::{Error, Result};

pub use bundle::{read_bundle, write_bundle, BundleManifest, ManifestEntry, MANIFEST_FILE};
pub use dataset::{read_pair_dataset, write_pair_dataset, PairDataset};
pub use params::{read_params, KernelParams, ParamsFile};
pub use plot::emit_plot;
pub use report::{emit_report, write_report};

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Resolves a manifest-relative path, refusing anything that escapes `base`.
pub(crate) fn resolve_relative(base: &Path, manifest: &Path, relative: &str) -> Result<PathBuf> {
    let rel = Path::new(relative);
    let escapes = rel.is_absolute()
        || rel
            .components()
            .any(|c| !matches!(c, Component::Normal(_) | Component::CurDir));
    if escapes || relative.is_empty() {
        return Err(Error::format(
            manifest,
            format!("payload path `{relative}` must be relative and stay inside the directory"),
        ));
    }
    Ok(base.join(rel))
}

/// Narrows `values` to little-endian `f32` bytes.
pub(crate) fn encode_f32<'a>(values: impl IntoIterator<Item = &'a f64>) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    for (i, &v) in values.into_iter().enumerate() {
        let narrow = v as f32;
        if !narrow.is_finite() {
            return Err(Error::contract(format!(
                "value {v} at index {i} does not fit in f32"
            )));
        }
        bytes.extend_from_slice(&narrow.to_le_bytes());
    }
    Ok(bytes)
}

/// Decodes little-endian `f32` bytes, rejecting non-finite values with their
/// byte offset.
pub(crate) fn decode_f32(path: &Path, bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(4) {
        return Err(Error::format(
            path,
            format!("payload of {} bytes is not a whole number of f32 values", bytes.len()),
        ));
    }
    bytes
        .chunks_exact(4)
        .enumerate()
        .map(|(i, chunk)| {
            let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            if v.is_finite() {
                Ok(f64::from(v))
            } else {
                Err(Error::format(
                    path,
                    format!("non-finite value {v} at byte offset {}", i * 4),
                ))
            }
        })
        .collect()
}
