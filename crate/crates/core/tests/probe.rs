mod support;

use std::collections::HashMap;

use kernelscope::probe::{build_pairs, max_margin, separable, PairTask, TokenPair};
use kernelscope::{evaluate, predict, run_directprobe, LabeledPoint, ProbeConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use support::{hulls_intersect, rng};

fn random_set(r: &mut ChaCha8Rng, count: usize, dim: usize, shift: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|k| r.gen_range(-1.0..1.0) + if k == 0 { shift } else { 0.0 }).collect())
        .collect()
}

#[test]
fn lp_oracle_sanity() {
    let tri = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 3.0]];
    assert!(hulls_intersect(&tri, &[vec![1.0, 1.0]]));
    assert!(!hulls_intersect(&tri, &[vec![3.0, 3.0]]));
    let a = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
    let b = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    assert!(hulls_intersect(&a, &b));
}

#[test]
fn separable_agrees_with_lp_oracle() {
    let mut r = rng(500);
    let mut disagreements = Vec::new();
    let mut separable_count = 0;
    for case in 0..500 {
        let na = r.gen_range(1..=6);
        let nb = r.gen_range(1..=6);
        let shift = r.gen_range(0.0..1.2);
        let a = random_set(&mut r, na, 3, 0.0);
        let b = random_set(&mut r, nb, 3, shift);
        let ours = separable(&a, &b, 1e-6).unwrap();
        let oracle = !hulls_intersect(&a, &b);
        separable_count += usize::from(oracle);
        if ours != oracle {
            disagreements.push(case);
        }
    }
    assert!(disagreements.is_empty(), "disagree on {disagreements:?}");
    // Both outcomes must be well represented for the comparison to mean much.
    assert!((100..400).contains(&separable_count), "{separable_count}");
}

#[test]
fn separable_is_symmetric_and_rigid_invariant() {
    let mut r = rng(17);
    for _ in 0..100 {
        let a = random_set(&mut r, 4, 2, 0.0);
        let shift = r.gen_range(0.0..3.0);
        let b = random_set(&mut r, 4, 2, shift);
        let s = separable(&a, &b, 1e-6).unwrap();
        assert_eq!(s, separable(&b, &a, 1e-6).unwrap());
        let theta: f64 = r.gen_range(0.0..std::f64::consts::TAU);
        let (c, sn) = (theta.cos(), theta.sin());
        let (tx, ty) = (r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let move_all = |s: &[Vec<f64>]| -> Vec<Vec<f64>> {
            s.iter().map(|p| vec![c * p[0] - sn * p[1] + tx, sn * p[0] + c * p[1] + ty]).collect()
        };
        let before = max_margin(&a, &b, 1e-6).unwrap().distance;
        let after = max_margin(&move_all(&a), &move_all(&b), 1e-6).unwrap().distance;
        if before > 1e-4 {
            assert_eq!(s, separable(&move_all(&a), &move_all(&b), 1e-6).unwrap());
            assert!((before - after).abs() < 1e-6 * before.max(1.0), "{before} vs {after}");
        }
    }
}

#[test]
fn dimension_mismatch_is_rejected() {
    assert!(separable(&[vec![0.0, 0.0]], &[vec![1.0]], 1e-6).is_err());
}

fn random_dataset(r: &mut ChaCha8Rng) -> Vec<LabeledPoint> {
    let dim = r.gen_range(1..=8);
    let n = r.gen_range(1..=60);
    let labels = r.gen_range(1..=3);
    (0..n)
        .map(|_| {
            let label = r.gen_range(0..labels);
            let v = (0..dim).map(|_| r.gen_range(-1.0..1.0) + label as f64 * 0.7).collect();
            LabeledPoint::new(v, format!("l{label}"))
        })
        .collect()
}

#[test]
fn clusters_are_pure_and_separable_by_lp() {
    let mut r = rng(2024);
    for _ in 0..20 {
        let data = random_dataset(&mut r);
        let result = run_directprobe(&data, &ProbeConfig::default()).unwrap();
        let mut seen = vec![false; data.len()];
        for c in &result.clusters {
            for &m in &c.members {
                assert!(!seen[m]);
                seen[m] = true;
                assert_eq!(data[m].label, c.label);
            }
        }
        assert!(seen.iter().all(|&s| s));
        for (i, ci) in result.clusters.iter().enumerate() {
            for cj in &result.clusters[i + 1..] {
                if ci.label != cj.label {
                    let a: Vec<Vec<f64>> = ci.members.iter().map(|&m| data[m].vector.clone()).collect();
                    let b: Vec<Vec<f64>> = cj.members.iter().map(|&m| data[m].vector.clone()).collect();
                    assert!(!hulls_intersect(&a, &b));
                }
            }
        }
    }
}

#[test]
fn runs_are_deterministic_and_counts_bounded() {
    let mut r = rng(33);
    for _ in 0..10 {
        let data = random_dataset(&mut r);
        let a = run_directprobe(&data, &ProbeConfig::default()).unwrap();
        let b = run_directprobe(&data, &ProbeConfig::default()).unwrap();
        assert_eq!(a, b);
        for label in data.iter().map(|p| p.label.as_str()) {
            let points = data.iter().filter(|p| p.label == label).count();
            assert!(a.cluster_count(label) <= points);
            assert!(a.cluster_count(label) >= 1);
        }
        assert_eq!(a.clusters.len() + a.merge_log.len(), data.len());
    }
}

fn blobs(r: &mut ChaCha8Rng, per_label: usize, dim: usize, separation: f64) -> Vec<LabeledPoint> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut out = Vec::new();
    for _ in 0..per_label {
        for (label, center) in [("a", 0.0), ("b", separation)] {
            let v = (0..dim)
                .map(|k| normal.sample(r) + if k == 0 { center } else { 0.0 })
                .collect();
            out.push(LabeledPoint::new(v, label));
        }
    }
    out
}

#[test]
fn well_separated_blobs_give_one_cluster_per_label() {
    let mut r = rng(8);
    let data = blobs(&mut r, 40, 3, 12.0);
    let a: Vec<Vec<f64>> = data.iter().filter(|p| p.label == "a").map(|p| p.vector.clone()).collect();
    let b: Vec<Vec<f64>> = data.iter().filter(|p| p.label == "b").map(|p| p.vector.clone()).collect();
    assert!(!hulls_intersect(&a, &b), "fixture blobs overlap");
    let result = run_directprobe(&data, &ProbeConfig::default()).unwrap();
    assert_eq!(result.cluster_count("a"), 1);
    assert_eq!(result.cluster_count("b"), 1);
}

#[test]
fn heldout_equal_to_training_scores_perfectly() {
    let mut r = rng(12);
    let data = blobs(&mut r, 30, 2, 3.0);
    let result = run_directprobe(&data, &ProbeConfig::default()).unwrap();
    let eval = evaluate(&result, &data).unwrap();
    assert_eq!(eval.mean_accuracy, 1.0);
    for p in &data {
        assert_eq!(predict(&result, &p.vector).unwrap(), p.label);
    }
    let swapped: Vec<LabeledPoint> = data
        .iter()
        .map(|p| LabeledPoint::new(p.vector.clone(), if p.label == "a" { "b" } else { "a" }))
        .collect();
    assert_eq!(evaluate(&result, &swapped).unwrap().mean_accuracy, 0.0);
}

#[test]
fn pair_encodings() {
    let reps = HashMap::from([
        ("x".to_string(), vec![1.0, 2.0]),
        ("y".to_string(), vec![3.0, 4.0]),
    ]);
    let d = build_pairs(&reps, &[TokenPair::new("x", "x", "3")], PairTask::Distance).unwrap();
    assert_eq!(d.points[0].vector, vec![0.0, 0.0]);
    let s = build_pairs(&reps, &[TokenPair::new("x", "y", "siblings")], PairTask::Siblings).unwrap();
    assert_eq!(s.points[0].vector, vec![1.0, 2.0, 3.0, 4.0]);
    let skipped = build_pairs(
        &reps,
        &[TokenPair::new("x", "y", "7"), TokenPair::new("y", "x", "2")],
        PairTask::Distance,
    )
    .unwrap();
    assert_eq!((skipped.points.len(), skipped.skipped), (1, 1));
    let err = build_pairs(&reps, &[TokenPair::new("x", "zz", "2")], PairTask::Distance).unwrap_err();
    assert!(err.to_string().contains("zz"));
    assert!(build_pairs(&reps, &[TokenPair::new("x", "y", "cousins")], PairTask::Siblings).is_err());
}
