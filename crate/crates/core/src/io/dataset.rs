//! Representation-pair datasets.
//!
//! A dataset is a JSON manifest naming its token ids in matrix row order, a
//! row-major little-endian `f32` matrix with `dimension` values per token,
//! and a pair list with one `id_i id_j label` line per pair. Labels run to
//! the end of the line and may contain spaces; blank lines are ignored.
//!
//! ```json
//! { "dimension": 768, "tokens": ["t0", "t1"], "matrix": "reps.f32", "pairs": "pairs.txt" }
//! ```

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probe::TokenPair;

use super::{atomic_write, create_dir, decode_f32, encode_f32, read_file, read_text, resolve_relative};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub dimension: usize,
    pub tokens: Vec<String>,
    pub matrix: String,
    pub pairs: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    pub dimension: usize,
    /// Token ids in matrix row order.
    pub tokens: Vec<String>,
    pub representations: HashMap<String, Vec<f64>>,
    pub pairs: Vec<TokenPair>,
}

fn parse_pairs(path: &Path, text: &str) -> Result<Vec<TokenPair>> {
    let mut pairs = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.splitn(3, char::is_whitespace);
        let (Some(first), Some(second), Some(label)) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::format(
                path,
                format!("line {}: expected `id_i id_j label`", line_no + 1),
            ));
        };
        let label = label.trim();
        if second.is_empty() || label.is_empty() {
            return Err(Error::format(
                path,
                format!("line {}: expected `id_i id_j label`", line_no + 1),
            ));
        }
        pairs.push(TokenPair::new(first, second, label));
    }
    Ok(pairs)
}

/// Reads the dataset whose manifest is at `manifest_path`; payload paths are
/// relative to the manifest's directory.
pub fn read_pair_dataset(manifest_path: &Path) -> Result<PairDataset> {
    let manifest: DatasetManifest = serde_json::from_str(&read_text(manifest_path)?)
        .map_err(|e| Error::format(manifest_path, format!("malformed dataset manifest: {e}")))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    if manifest.dimension == 0 {
        return Err(Error::format(manifest_path, "dimension must be at least 1"));
    }

    let mut seen = HashSet::new();
    for id in &manifest.tokens {
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::format(
                manifest_path,
                format!("token id `{id}` must be nonempty without whitespace"),
            ));
        }
        if !seen.insert(id.as_str()) {
            return Err(Error::format(manifest_path, format!("duplicate token id `{id}`")));
        }
    }

    let matrix_path = resolve_relative(base, manifest_path, &manifest.matrix)?;
    let bytes = read_file(&matrix_path)?;
    let expected = manifest.tokens.len() * manifest.dimension * 4;
    if bytes.len() != expected {
        return Err(Error::format(
            &matrix_path,
            format!(
                "size mismatch: {} tokens × {} dims needs {expected} bytes, found {}",
                manifest.tokens.len(),
                manifest.dimension,
                bytes.len()
            ),
        ));
    }
    let values = decode_f32(&matrix_path, &bytes)?;
    let representations = manifest
        .tokens
        .iter()
        .cloned()
        .zip(values.chunks(manifest.dimension).map(<[f64]>::to_vec))
        .collect();

    let pairs_path = resolve_relative(base, manifest_path, &manifest.pairs)?;
    let pairs = parse_pairs(&pairs_path, &read_text(&pairs_path)?)?;

    Ok(PairDataset {
        dimension: manifest.dimension,
        tokens: manifest.tokens,
        representations,
        pairs,
    })
}

/// Writes `reps.f32` and `pairs.txt` beside the manifest at `manifest_path`.
pub fn write_pair_dataset(dataset: &PairDataset, manifest_path: &Path) -> Result<()> {
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    if !base.as_os_str().is_empty() {
        create_dir(base)?;
    }
    let mut matrix = Vec::with_capacity(dataset.tokens.len() * dataset.dimension);
    for id in &dataset.tokens {
        let row = dataset
            .representations
            .get(id)
            .ok_or_else(|| Error::UnknownToken(id.clone()))?;
        if row.len() != dataset.dimension {
            return Err(Error::DimensionMismatch {
                expected: dataset.dimension,
                found: row.len(),
            });
        }
        matrix.extend(row.iter().copied());
    }
    let mut pairs = String::new();
    for p in &dataset.pairs {
        if p.label.contains('\n') || p.first.contains(char::is_whitespace) {
            return Err(Error::contract(format!("pair {p:?} cannot be written as one line")));
        }
        pairs.push_str(&format!("{} {} {}\n", p.first, p.second, p.label));
    }
    let manifest = DatasetManifest {
        dimension: dataset.dimension,
        tokens: dataset.tokens.clone(),
        matrix: "reps.f32".into(),
        pairs: "pairs.txt".into(),
    };
    atomic_write(&base.join(&manifest.matrix), &encode_f32(&matrix)?)?;
    atomic_write(&base.join(&manifest.pairs), pairs.as_bytes())?;
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Internal(format!("manifest serialization failed: {e}")))?;
    text.push('\n');
    atomic_write(manifest_path, text.as_bytes())
}
