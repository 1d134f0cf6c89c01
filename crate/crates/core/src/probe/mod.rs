//! Classifier-free probing of labeled representation pairs.
//!
//! Clustering starts from singletons and greedily merges the closest pair of
//! same-label clusters (by centroid distance) whenever the merged hull stays
//! linearly separable from every cluster of another label. The resulting
//! clusters act as a nearest-cluster classifier for held-out points.

pub mod separability;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use separability::{max_margin, separable, Separation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub vector: Vec<f64>,
    pub label: String,
}

impl LabeledPoint {
    pub fn new(vector: Vec<f64>, label: impl Into<String>) -> Self {
        LabeledPoint {
            vector,
            label: label.into(),
        }
    }
}

/// Checks coordinates, dimensions and labels; returns the shared dimension.
pub fn validate_points(points: &[LabeledPoint]) -> Result<usize> {
    let dim = points.first().map_or(0, |p| p.vector.len());
    for (i, p) in points.iter().enumerate() {
        if p.vector.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.vector.len(),
            });
        }
        if let Some((index, &value)) = p.vector.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::contract(format!(
                "point {i} has non-finite coordinate {value} at {index}"
            )));
        }
        if p.label.is_empty() {
            return Err(Error::contract(format!("point {i} has an empty label")));
        }
    }
    Ok(dim)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub label: String,
    /// Indices into the training set, ascending.
    pub members: Vec<usize>,
    pub centroid: Vec<f64>,
}

impl Cluster {
    fn singleton(index: usize, point: &LabeledPoint) -> Self {
        Cluster {
            label: point.label.clone(),
            members: vec![index],
            centroid: point.vector.clone(),
        }
    }

    fn merged(&self, other: &Cluster) -> Cluster {
        let (na, nb) = (self.members.len() as f64, other.members.len() as f64);
        let centroid = self
            .centroid
            .iter()
            .zip(&other.centroid)
            .map(|(a, b)| (a * na + b * nb) / (na + nb))
            .collect();
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        members.sort_unstable();
        Cluster {
            label: self.label.clone(),
            members,
            centroid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeRecord {
    /// Positions of the merged clusters in the cluster list at merge time.
    pub first: usize,
    pub second: usize,
    pub centroid_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStatus {
    Converged,
    /// The merge-attempt budget ran out before clustering settled.
    NonConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub status: ProbeStatus,
    pub dimension: usize,
    pub clusters: Vec<Cluster>,
    pub merge_log: Vec<MergeRecord>,
    pub merge_attempts: usize,
    /// Training points, needed for nearest-cluster prediction.
    #[serde(skip)]
    pub points: Vec<Vec<f64>>,
}

impl ProbeResult {
    pub fn cluster_count(&self, label: &str) -> usize {
        self.clusters.iter().filter(|c| c.label == label).count()
    }

    pub fn member_points(&self, cluster: usize) -> Vec<&[f64]> {
        self.clusters[cluster]
            .members
            .iter()
            .map(|&i| self.points[i].as_slice())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub separability_tolerance: f64,
    /// Merge attempts allowed per n² training points.
    pub merge_budget_factor: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            separability_tolerance: 1e-6,
            merge_budget_factor: 10,
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Constrained agglomerative clustering of `dataset`.
pub fn run_directprobe(dataset: &[LabeledPoint], config: &ProbeConfig) -> Result<ProbeResult> {
    if dataset.is_empty() {
        return Err(Error::contract("probing needs at least one point"));
    }
    let dimension = validate_points(dataset)?;
    let points: Vec<Vec<f64>> = dataset.iter().map(|p| p.vector.clone()).collect();
    let n = dataset.len();
    let budget = config.merge_budget_factor.saturating_mul(n).saturating_mul(n);

    // Clusters keep a stable id so that a blocked pair stays blocked only
    // while both of its clusters are unchanged.
    let mut clusters: Vec<(u64, Cluster)> = dataset
        .iter()
        .enumerate()
        .map(|(i, p)| (i as u64, Cluster::singleton(i, p)))
        .collect();
    let mut next_id = n as u64;
    let mut blocked: HashSet<(u64, u64)> = HashSet::new();
    let mut merge_log = Vec::new();
    let mut attempts = 0;
    let mut status = ProbeStatus::Converged;

    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let (id_a, a) = &clusters[i];
                let (id_b, b) = &clusters[j];
                if a.label != b.label || blocked.contains(&(*id_a, *id_b)) {
                    continue;
                }
                let d = squared_distance(&a.centroid, &b.centroid);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((d, i, j)) = best else { break };
        if attempts >= budget {
            status = ProbeStatus::NonConverged;
            break;
        }
        attempts += 1;

        let candidate = clusters[i].1.merged(&clusters[j].1);
        let merged_points: Vec<&[f64]> =
            candidate.members.iter().map(|&m| points[m].as_slice()).collect();
        let opposing: Vec<&Cluster> = clusters
            .iter()
            .map(|(_, c)| c)
            .filter(|c| c.label != candidate.label)
            .collect();
        let admissible = opposing
            .par_iter()
            .map(|other| {
                let other_points: Vec<&[f64]> =
                    other.members.iter().map(|&m| points[m].as_slice()).collect();
                separable(&merged_points, &other_points, config.separability_tolerance)
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|ok| ok);

        if admissible {
            merge_log.push(MergeRecord {
                first: i,
                second: j,
                centroid_distance: d.sqrt(),
            });
            clusters.remove(j);
            clusters[i] = (next_id, candidate);
            next_id += 1;
        } else {
            blocked.insert((clusters[i].0, clusters[j].0));
        }
    }

    Ok(ProbeResult {
        status,
        dimension,
        clusters: clusters.into_iter().map(|(_, c)| c).collect(),
        merge_log,
        merge_attempts: attempts,
        points,
    })
}

/// Label of the cluster holding the training point closest to `query`; ties
/// go to the lower cluster index.
pub fn predict<'a>(result: &'a ProbeResult, query: &[f64]) -> Result<&'a str> {
    if result.clusters.is_empty() {
        return Err(Error::contract("cannot predict from an empty probe result"));
    }
    if query.len() != result.dimension {
        return Err(Error::DimensionMismatch {
            expected: result.dimension,
            found: query.len(),
        });
    }
    let mut best = (f64::INFINITY, 0);
    for (index, cluster) in result.clusters.iter().enumerate() {
        let d = cluster
            .members
            .iter()
            .map(|&m| squared_distance(&result.points[m], query))
            .fold(f64::INFINITY, f64::min);
        if d < best.0 {
            best = (d, index);
        }
    }
    Ok(&result.clusters[best.1].label)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelAccuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalResult {
    pub per_label: BTreeMap<String, LabelAccuracy>,
    /// Unweighted mean over the labels present in the held-out set.
    pub mean_accuracy: f64,
    /// Held-out labels never seen in training; always counted wrong.
    pub unseen_labels: Vec<String>,
}

pub fn evaluate(result: &ProbeResult, heldout: &[LabeledPoint]) -> Result<EvalResult> {
    if heldout.is_empty() {
        return Err(Error::contract("evaluation needs a nonempty held-out set"));
    }
    if result.status == ProbeStatus::NonConverged {
        return Err(Error::contract(
            "probe did not converge within its merge budget; excluded from evaluation",
        ));
    }
    validate_points(heldout)?;
    let known: HashSet<&str> = result.clusters.iter().map(|c| c.label.as_str()).collect();
    let predictions = heldout
        .par_iter()
        .map(|p| predict(result, &p.vector))
        .collect::<Result<Vec<_>>>()?;

    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut unseen = BTreeSet::new();
    for (point, predicted) in heldout.iter().zip(predictions) {
        let entry = counts.entry(point.label.clone()).or_default();
        entry.1 += 1;
        if !known.contains(point.label.as_str()) {
            unseen.insert(point.label.clone());
        } else if predicted == point.label {
            entry.0 += 1;
        }
    }
    let per_label: BTreeMap<String, LabelAccuracy> = counts
        .into_iter()
        .map(|(label, (correct, total))| {
            let accuracy = correct as f64 / total as f64;
            (label, LabelAccuracy { correct, total, accuracy })
        })
        .collect();
    let mean_accuracy =
        per_label.values().map(|a| a.accuracy).sum::<f64>() / per_label.len() as f64;
    Ok(EvalResult {
        per_label,
        mean_accuracy,
        unseen_labels: unseen.into_iter().collect(),
    })
}

/// Probing task: fixes the pair encoding and the admissible labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairTask {
    /// Tree distance 2..=6, encoded as `h_i - h_j`.
    Distance,
    /// Sibling or not, encoded as `h_i ⧺ h_j`.
    Siblings,
    /// Data-flow edge kind, encoded as `h_i ⧺ h_j`.
    #[serde(rename = "dfg")]
    DfgEdge,
}

impl PairTask {
    pub const MAX_DISTANCE: u32 = 6;
    pub const MIN_DISTANCE: u32 = 2;

    pub fn name(self) -> &'static str {
        match self {
            PairTask::Distance => "distance",
            PairTask::Siblings => "siblings",
            PairTask::DfgEdge => "dfg",
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            PairTask::Distance => &["2", "3", "4", "5", "6"],
            PairTask::Siblings => &["siblings", "not siblings"],
            PairTask::DfgEdge => &["no edge", "comes from", "computed from"],
        }
    }
}

impl fmt::Display for PairTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

enum LabelCheck {
    Keep(String),
    Skip,
}

fn check_label(task: PairTask, label: &str) -> Result<LabelCheck> {
    let invalid = || Error::InvalidLabel {
        label: label.to_string(),
        task: task.name(),
    };
    match task {
        PairTask::Distance => {
            let distance: u32 = label.trim().parse().map_err(|_| invalid())?;
            if distance > PairTask::MAX_DISTANCE {
                Ok(LabelCheck::Skip)
            } else if distance < PairTask::MIN_DISTANCE {
                Err(invalid())
            } else {
                Ok(LabelCheck::Keep(distance.to_string()))
            }
        }
        PairTask::Siblings | PairTask::DfgEdge => {
            let canonical = label.trim().replace(['_', '-'], " ");
            if task.labels().contains(&canonical.as_str()) {
                Ok(LabelCheck::Keep(canonical))
            } else {
                Err(invalid())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenPair {
    pub first: String,
    pub second: String,
    pub label: String,
}

impl TokenPair {
    pub fn new(first: impl Into<String>, second: impl Into<String>, label: impl Into<String>) -> Self {
        TokenPair {
            first: first.into(),
            second: second.into(),
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairBuild {
    pub points: Vec<LabeledPoint>,
    /// Distance pairs dropped for exceeding the maximum tree distance.
    pub skipped: usize,
}

/// Encodes token pairs as probe points for `task`.
pub fn build_pairs(
    representations: &HashMap<String, Vec<f64>>,
    pairs: &[TokenPair],
    task: PairTask,
) -> Result<PairBuild> {
    let mut points = Vec::with_capacity(pairs.len());
    let mut skipped = 0;
    for pair in pairs {
        let lookup = |id: &str| {
            representations
                .get(id)
                .ok_or_else(|| Error::UnknownToken(id.to_string()))
        };
        let hi = lookup(&pair.first)?;
        let hj = lookup(&pair.second)?;
        let label = match check_label(task, &pair.label)? {
            LabelCheck::Keep(label) => label,
            LabelCheck::Skip => {
                skipped += 1;
                continue;
            }
        };
        if hi.len() != hj.len() {
            return Err(Error::DimensionMismatch {
                expected: hi.len(),
                found: hj.len(),
            });
        }
        let vector = match task {
            PairTask::Distance => hi.iter().zip(hj).map(|(a, b)| a - b).collect(),
            PairTask::Siblings | PairTask::DfgEdge => hi.iter().chain(hj).copied().collect(),
        };
        points.push(LabeledPoint { vector, label });
    }
    Ok(PairBuild { points, skipped })
}
