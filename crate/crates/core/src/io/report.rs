//! JSON reports.
//!
//! Every report is an object whose first key is `schema`, a versioned name
//! such as `kernelscope.analyze/1`. Keys appear in declaration order and maps
//! are sorted, so identical inputs give byte-identical text. Infinite LHFR
//! values are written as the string `"infinite"`.
//!
//! | schema | body |
//! |---|---|
//! | `kernelscope.analyze/1` | `model_tag`, `config`, `layers[]` of per-kernel summaries |
//! | `kernelscope.diff/1` | `before`, `after` model tags, `tau`, `kernels[]`, `early_layers_shifted[]` |
//! | `kernelscope.complementary/1` | `model_tag`, `layers[]` with `strength` |
//! | `kernelscope.redundancy/1` | `model_tag`, `cutoff`, `pairs[]` |
//! | `kernelscope.probe/1` | `task`, skip counts, `clusters[]`, `evaluation` |

use std::path::Path;

use serde::Serialize;

use crate::analysis::{ComplementarityReport, LayerComplementarity, LayerReport, RedundancyPair, ShiftReport};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::probe::{Cluster, EvalResult, PairTask, ProbeResult, ProbeStatus};

use super::atomic_write;

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport<'a> {
    pub schema: &'static str,
    pub model_tag: &'a str,
    pub config: &'a RunConfig,
    pub layers: &'a [LayerReport],
}

impl<'a> AnalyzeReport<'a> {
    pub fn new(model_tag: &'a str, config: &'a RunConfig, layers: &'a [LayerReport]) -> Self {
        AnalyzeReport {
            schema: "kernelscope.analyze/1",
            model_tag,
            config,
            layers,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffReport<'a> {
    pub schema: &'static str,
    pub before: &'a str,
    pub after: &'a str,
    #[serde(flatten)]
    pub shift: &'a ShiftReport,
}

impl<'a> DiffReport<'a> {
    pub fn new(before: &'a str, after: &'a str, shift: &'a ShiftReport) -> Self {
        DiffReport {
            schema: "kernelscope.diff/1",
            before,
            after,
            shift,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplementaryReport<'a> {
    pub schema: &'static str,
    pub model_tag: &'a str,
    pub layers: &'a [LayerComplementarity],
}

impl<'a> ComplementaryReport<'a> {
    pub fn new(model_tag: &'a str, report: &'a ComplementarityReport) -> Self {
        ComplementaryReport {
            schema: "kernelscope.complementary/1",
            model_tag,
            layers: &report.layers,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RedundancyReport<'a> {
    pub schema: &'static str,
    pub model_tag: &'a str,
    pub cutoff: f64,
    pub pairs: &'a [RedundancyPair],
}

impl<'a> RedundancyReport<'a> {
    pub fn new(model_tag: &'a str, cutoff: f64, pairs: &'a [RedundancyPair]) -> Self {
        RedundancyReport {
            schema: "kernelscope.redundancy/1",
            model_tag,
            cutoff,
            pairs,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport<'a> {
    pub schema: &'static str,
    pub task: PairTask,
    pub train_points: usize,
    pub train_skipped: usize,
    pub eval_points: usize,
    pub eval_skipped: usize,
    pub status: ProbeStatus,
    pub merge_attempts: usize,
    pub clusters: &'a [Cluster],
    pub evaluation: Option<&'a EvalResult>,
}

impl<'a> ProbeReport<'a> {
    pub fn new(
        task: PairTask,
        (train_points, train_skipped): (usize, usize),
        (eval_points, eval_skipped): (usize, usize),
        result: &'a ProbeResult,
        evaluation: Option<&'a EvalResult>,
    ) -> Self {
        ProbeReport {
            schema: "kernelscope.probe/1",
            task,
            train_points,
            train_skipped,
            eval_points,
            eval_skipped,
            status: result.status,
            merge_attempts: result.merge_attempts,
            clusters: &result.clusters,
            evaluation,
        }
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn emit_report<T: Serialize + ?Sized>(report: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Internal(format!("report serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn write_report<T: Serialize + ?Sized>(report: &T, path: &Path) -> Result<()> {
    atomic_write(path, emit_report(report)?.as_bytes())
}
