//! Whole-model analysis over a [`KernelBundle`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{categorize, Categorization, FilterClass, Verdict};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::spectral::{compute_spectrum, summarize, Direction, Kernel, SpectralSummary};

/// Kernels of one layer, each direction ordered by kernel index.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerKernels {
    pub forward: Vec<Kernel>,
    pub backward: Vec<Kernel>,
}

impl LayerKernels {
    pub fn direction(&self, direction: Direction) -> &[Kernel] {
        match direction {
            Direction::Forward => &self.forward,
            Direction::Backward => &self.backward,
        }
    }
}

/// Every kernel of one model, keyed by layer.
///
/// Layers run contiguously from 1, both directions are present everywhere,
/// each direction holds the same number of kernels indexed `0..k`, and all
/// kernels share one length.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBundle {
    model_tag: String,
    length: usize,
    kernels_per_direction: usize,
    layers: BTreeMap<u32, LayerKernels>,
}

impl KernelBundle {
    /// Validates and organizes kernels given in any order.
    pub fn from_kernels(model_tag: impl Into<String>, kernels: Vec<Kernel>) -> Result<Self> {
        let first = kernels
            .first()
            .ok_or_else(|| Error::contract("a bundle needs at least one layer"))?;
        let length = first.len();
        let mut slots: BTreeMap<(u32, Direction, u32), Kernel> = BTreeMap::new();
        for kernel in kernels {
            if kernel.len() != length {
                return Err(Error::contract(format!(
                    "layer {} {} index {} has length {}, bundle length is {length}",
                    kernel.layer(),
                    kernel.direction(),
                    kernel.kernel_index(),
                    kernel.len()
                )));
            }
            let key = (kernel.layer(), kernel.direction(), kernel.kernel_index());
            if slots.insert(key, kernel).is_some() {
                return Err(Error::contract(format!(
                    "duplicate kernel at layer {} {} index {}",
                    key.0, key.1, key.2
                )));
            }
        }

        let layer_count = slots.keys().map(|k| k.0).max().unwrap_or(0);
        let per_direction = slots.keys().map(|k| k.2 + 1).max().unwrap_or(0);
        let expected = layer_count as usize * 2 * per_direction as usize;
        if slots.len() != expected {
            for layer in 1..=layer_count {
                for direction in Direction::BOTH {
                    for index in 0..per_direction {
                        if !slots.contains_key(&(layer, direction, index)) {
                            return Err(Error::MissingKernel {
                                layer,
                                direction,
                                index,
                            });
                        }
                    }
                }
            }
        }

        let mut layers = BTreeMap::new();
        let mut slots = slots.into_iter().peekable();
        for layer in 1..=layer_count {
            let mut take = |direction| -> Vec<Kernel> {
                let mut out = Vec::new();
                while let Some(((l, d, _), _)) = slots.peek() {
                    if *l == layer && *d == direction {
                        out.push(slots.next().unwrap().1);
                    } else {
                        break;
                    }
                }
                out
            };
            let forward = take(Direction::Forward);
            let backward = take(Direction::Backward);
            layers.insert(layer, LayerKernels { forward, backward });
        }

        Ok(KernelBundle {
            model_tag: model_tag.into(),
            length,
            kernels_per_direction: per_direction as usize,
            layers,
        })
    }

    pub fn model_tag(&self) -> &str {
        &self.model_tag
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn kernels_per_direction(&self) -> usize {
        self.kernels_per_direction
    }

    pub fn layers(&self) -> &BTreeMap<u32, LayerKernels> {
        &self.layers
    }

    pub fn layer(&self, layer: u32) -> Option<&LayerKernels> {
        self.layers.get(&layer)
    }

    /// All kernels ordered by (layer, direction, kernel index).
    pub fn kernels(&self) -> impl Iterator<Item = &Kernel> + '_ {
        self.layers
            .values()
            .flat_map(|l| l.forward.iter().chain(l.backward.iter()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KernelOutcome {
    Analyzed {
        summary: SpectralSummary,
        categorization: Categorization,
    },
    Degenerate,
}

impl KernelOutcome {
    pub fn verdict(&self) -> Option<Verdict> {
        match self {
            KernelOutcome::Analyzed { categorization, .. } => Some(categorization.combined),
            KernelOutcome::Degenerate => None,
        }
    }

    pub fn summary(&self) -> Option<&SpectralSummary> {
        match self {
            KernelOutcome::Analyzed { summary, .. } => Some(summary),
            KernelOutcome::Degenerate => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelEntry {
    pub direction: Direction,
    pub kernel_index: u32,
    #[serde(flatten)]
    pub outcome: KernelOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerReport {
    pub layer: u32,
    pub kernels: Vec<KernelEntry>,
}

impl LayerReport {
    pub fn entry(&self, direction: Direction, kernel_index: u32) -> Option<&KernelEntry> {
        self.kernels
            .iter()
            .find(|e| e.direction == direction && e.kernel_index == kernel_index)
    }
}

/// Spectral summary and categorization of one kernel.
pub fn analyze_kernel(kernel: &Kernel, config: &RunConfig) -> Result<KernelOutcome> {
    if kernel.is_all_zero() {
        return Ok(KernelOutcome::Degenerate);
    }
    let spectrum = compute_spectrum(kernel);
    let summary = match summarize(&spectrum, &config.bands()) {
        Ok(summary) => summary,
        Err(Error::Degenerate(_)) => return Ok(KernelOutcome::Degenerate),
        Err(e) => return Err(e),
    };
    let categorization = categorize(&summary, &config.thresholds())?;
    Ok(KernelOutcome::Analyzed {
        summary,
        categorization,
    })
}

/// Per-layer classification of every kernel, ordered by (layer, direction,
/// kernel index).
pub fn analyze_bundle(bundle: &KernelBundle, config: &RunConfig) -> Result<Vec<LayerReport>> {
    config.validate()?;
    let kernels: Vec<&Kernel> = bundle.kernels().collect();
    let outcomes = kernels
        .par_iter()
        .map(|k| analyze_kernel(k, config))
        .collect::<Result<Vec<_>>>()?;

    let mut reports: Vec<LayerReport> = Vec::with_capacity(bundle.layer_count());
    for (kernel, outcome) in kernels.iter().zip(outcomes) {
        if reports.last().map(|r| r.layer) != Some(kernel.layer()) {
            reports.push(LayerReport {
                layer: kernel.layer(),
                kernels: Vec::new(),
            });
        }
        reports.last_mut().unwrap().kernels.push(KernelEntry {
            direction: kernel.direction(),
            kernel_index: kernel.kernel_index(),
            outcome,
        });
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Complementarity {
    Strict,
    Weak,
    None,
}

/// Complementarity strength of a forward/backward verdict pair.
pub fn complementarity(forward: Option<Verdict>, backward: Option<Verdict>) -> Complementarity {
    use FilterClass::*;
    let (Some(f), Some(b)) = (forward.and_then(Verdict::class), backward.and_then(Verdict::class))
    else {
        return Complementarity::None;
    };
    match (f, b) {
        (LowPass, HighPass) | (HighPass, LowPass) => Complementarity::Strict,
        (BandPass, LowPass | HighPass) | (LowPass | HighPass, BandPass) => Complementarity::Weak,
        _ => Complementarity::None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerComplementarity {
    pub layer: u32,
    pub strength: Complementarity,
    /// Combined verdicts; absent for degenerate kernels.
    pub forward: Option<Verdict>,
    pub backward: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplementarityReport {
    pub layers: Vec<LayerComplementarity>,
}

impl ComplementarityReport {
    pub fn strength(&self, layer: u32) -> Option<Complementarity> {
        self.layers
            .iter()
            .find(|l| l.layer == layer)
            .map(|l| l.strength)
    }
}

/// Requires exactly one kernel per direction in every layer.
pub fn detect_complementary(reports: &[LayerReport]) -> Result<ComplementarityReport> {
    let mut layers = Vec::with_capacity(reports.len());
    for report in reports {
        let count = |d| report.kernels.iter().filter(|e| e.direction == d).count();
        let (nf, nb) = (count(Direction::Forward), count(Direction::Backward));
        if nf != 1 || nb != 1 {
            return Err(Error::MultiKernelLayer {
                layer: report.layer,
                count: nf.max(nb),
            });
        }
        let verdict = |d| report.entry(d, 0).and_then(|e| e.outcome.verdict());
        let forward = verdict(Direction::Forward);
        let backward = verdict(Direction::Backward);
        layers.push(LayerComplementarity {
            layer: report.layer,
            strength: complementarity(forward, backward),
            forward,
            backward,
        });
    }
    Ok(ComplementarityReport { layers })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelShift {
    pub layer: u32,
    pub direction: Direction,
    pub kernel_index: u32,
    pub sc_before: f64,
    pub sc_after: f64,
    pub delta_sc: f64,
    pub class_before: Verdict,
    pub class_after: Verdict,
    pub shifted_high: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftReport {
    pub tau: f64,
    pub kernels: Vec<KernelShift>,
    /// Layers in the first half of the stack with a forward kernel that
    /// shifted toward high frequencies.
    pub early_layers_shifted: Vec<u32>,
}

impl ShiftReport {
    pub fn get(&self, layer: u32, direction: Direction, kernel_index: u32) -> Option<&KernelShift> {
        self.kernels.iter().find(|k| {
            k.layer == layer && k.direction == direction && k.kernel_index == kernel_index
        })
    }
}

/// Whether a verdict change moves up the low → band → high order.
fn moved_up(before: Verdict, after: Verdict) -> bool {
    match (before.class(), after.class()) {
        (Some(b), Some(a)) => a.rank() > b.rank(),
        _ => false,
    }
}

fn check_topology(before: &KernelBundle, after: &KernelBundle) -> Result<()> {
    if before.layer_count() != after.layer_count() {
        return Err(Error::Topology(format!(
            "layer count {} vs {}",
            before.layer_count(),
            after.layer_count()
        )));
    }
    if before.kernels_per_direction() != after.kernels_per_direction() {
        return Err(Error::Topology(format!(
            "kernels per direction {} vs {}",
            before.kernels_per_direction(),
            after.kernels_per_direction()
        )));
    }
    if before.length() != after.length() {
        return Err(Error::Topology(format!(
            "kernel length {} vs {}",
            before.length(),
            after.length()
        )));
    }
    Ok(())
}

fn centroid_and_verdict(kernel: &Kernel, config: &RunConfig) -> Result<(f64, Verdict)> {
    match analyze_kernel(kernel, config)? {
        KernelOutcome::Analyzed {
            summary,
            categorization,
        } => Ok((summary.centroid, categorization.combined)),
        KernelOutcome::Degenerate => Err(Error::Degenerate(format!(
            "layer {} {} index {} is all zero; no centroid to compare",
            kernel.layer(),
            kernel.direction(),
            kernel.kernel_index()
        ))),
    }
}

/// Per-kernel centroid change and class transition between two checkpoints of
/// the same architecture.
pub fn diff_bundles(
    before: &KernelBundle,
    after: &KernelBundle,
    config: &RunConfig,
) -> Result<ShiftReport> {
    config.validate()?;
    check_topology(before, after)?;
    let pairs: Vec<(&Kernel, &Kernel)> = before.kernels().zip(after.kernels()).collect();
    let kernels = pairs
        .par_iter()
        .map(|(b, a)| {
            let (sc_before, class_before) = centroid_and_verdict(b, config)?;
            let (sc_after, class_after) = centroid_and_verdict(a, config)?;
            let delta_sc = sc_after - sc_before;
            Ok(KernelShift {
                layer: b.layer(),
                direction: b.direction(),
                kernel_index: b.kernel_index(),
                sc_before,
                sc_after,
                delta_sc,
                class_before,
                class_after,
                shifted_high: delta_sc > config.shift_tau || moved_up(class_before, class_after),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let early_cutoff = before.layer_count().div_ceil(2) as u32;
    let mut early_layers_shifted: Vec<u32> = kernels
        .iter()
        .filter(|k| k.layer <= early_cutoff && k.direction == Direction::Forward && k.shifted_high)
        .map(|k| k.layer)
        .collect();
    early_layers_shifted.dedup();

    Ok(ShiftReport {
        tau: config.shift_tau,
        kernels,
        early_layers_shifted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedundancyPair {
    pub layer: u32,
    pub direction: Direction,
    pub first: u32,
    pub second: u32,
    pub similarity: f64,
    pub redundant: bool,
}

/// Cosine similarity of two magnitude spectra; zero when either is empty.
pub fn spectral_cosine(a: &Kernel, b: &Kernel) -> f64 {
    let sa = compute_spectrum(a);
    let sb = compute_spectrum(b);
    let dot: f64 = sa.magnitudes().iter().zip(sb.magnitudes()).map(|(x, y)| x * y).sum();
    let norm = |s: &[f64]| s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let denom = norm(sa.magnitudes()) * norm(sb.magnitudes());
    if denom == 0.0 {
        0.0
    } else {
        (dot / denom).clamp(-1.0, 1.0)
    }
}

/// Similarity of every same-layer, same-direction kernel pair.
pub fn analyze_redundancy(bundle: &KernelBundle, config: &RunConfig) -> Result<Vec<RedundancyPair>> {
    config.validate()?;
    if bundle.kernels_per_direction() < 2 {
        return Err(Error::SingleKernel(bundle.kernels_per_direction()));
    }
    let mut jobs = Vec::new();
    for (&layer, kernels) in bundle.layers() {
        for direction in Direction::BOTH {
            let group = kernels.direction(direction);
            for i in 0..group.len() {
                for j in i + 1..group.len() {
                    jobs.push((layer, direction, &group[i], &group[j]));
                }
            }
        }
    }
    Ok(jobs
        .par_iter()
        .map(|&(layer, direction, a, b)| {
            let similarity = spectral_cosine(a, b);
            RedundancyPair {
                layer,
                direction,
                first: a.kernel_index(),
                second: b.kernel_index(),
                similarity,
                redundant: similarity >= config.redundancy_cutoff,
            }
        })
        .collect())
}
