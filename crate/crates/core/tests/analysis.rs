mod support;

use kernelscope::analysis::{analyze_kernel, spectral_cosine, KernelOutcome};
use kernelscope::classify::Verdict;
use kernelscope::{
    analyze_bundle, analyze_redundancy, categorize, compute_spectrum, detect_complementary,
    diff_bundles, summarize, Complementarity, Direction, FilterClass, Kernel, KernelBundle,
    RunConfig,
};
use rand::seq::SliceRandom;

use support::{bundle_of, high_pass, low_pass, random_values, rng, synth};

fn random_bundle(seed: u64, layers: u32, k: u32, n: usize) -> Vec<Kernel> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for layer in 1..=layers {
        for d in Direction::BOTH {
            for i in 0..k {
                out.push(Kernel::new(random_values(&mut r, n), layer, d, i, "rand").unwrap());
            }
        }
    }
    out
}

#[test]
fn report_equals_kernel_by_kernel_pipeline() {
    let config = RunConfig::default();
    let kernels = random_bundle(1, 4, 2, 96);
    let bundle = KernelBundle::from_kernels("rand", kernels.clone()).unwrap();
    let reports = analyze_bundle(&bundle, &config).unwrap();
    for k in &kernels {
        let summary = summarize(&compute_spectrum(k), &config.bands()).unwrap();
        let categorization = categorize(&summary, &config.thresholds()).unwrap();
        let entry = reports[k.layer() as usize - 1]
            .entry(k.direction(), k.kernel_index())
            .unwrap();
        assert_eq!(
            entry.outcome,
            KernelOutcome::Analyzed {
                summary,
                categorization
            }
        );
    }
}

#[test]
fn insertion_order_never_matters() {
    let config = RunConfig::default();
    let mut kernels = random_bundle(2, 5, 3, 64);
    let reference = analyze_bundle(&KernelBundle::from_kernels("rand", kernels.clone()).unwrap(), &config).unwrap();
    let mut r = rng(99);
    for _ in 0..5 {
        kernels.shuffle(&mut r);
        let bundle = KernelBundle::from_kernels("rand", kernels.clone()).unwrap();
        assert_eq!(analyze_bundle(&bundle, &config).unwrap(), reference);
    }
}

#[test]
fn layer_eight_pattern() {
    let mut layers: Vec<(Kernel, Kernel)> = (0..12).map(|_| (low_pass(), low_pass())).collect();
    layers[7] = (high_pass(), low_pass());
    let reports = analyze_bundle(&bundle_of("mimic", &layers), &RunConfig::default()).unwrap();
    let l8 = &reports[7];
    assert_eq!(l8.layer, 8);
    assert_eq!(l8.entry(Direction::Forward, 0).unwrap().outcome.verdict(), Some(Verdict::HighPass));
    assert_eq!(l8.entry(Direction::Backward, 0).unwrap().outcome.verdict(), Some(Verdict::LowPass));
}

#[test]
fn all_ones_is_low_pass_and_zero_is_degenerate() {
    let ones = Kernel::from_values(vec![1.0; 32]).unwrap();
    let zero = Kernel::from_values(vec![0.0; 32]).unwrap();
    let reports = analyze_bundle(&bundle_of("m", &[(ones.clone(), ones.clone()), (zero, ones)]), &RunConfig::default()).unwrap();
    for d in Direction::BOTH {
        assert_eq!(reports[0].entry(d, 0).unwrap().outcome.verdict(), Some(Verdict::LowPass));
    }
    assert_eq!(reports[1].entry(Direction::Forward, 0).unwrap().outcome, KernelOutcome::Degenerate);
    assert_eq!(reports[1].entry(Direction::Backward, 0).unwrap().outcome.verdict(), Some(Verdict::LowPass));
}

#[test]
fn complementarity_is_direction_symmetric() {
    let classes = [FilterClass::LowPass, FilterClass::BandPass, FilterClass::HighPass];
    let mut layers = Vec::new();
    for &f in &classes {
        for &b in &classes {
            layers.push((synth(f), synth(b)));
        }
    }
    let swapped: Vec<(Kernel, Kernel)> = layers.iter().map(|(f, b)| (b.clone(), f.clone())).collect();
    let config = RunConfig::default();
    let a = detect_complementary(&analyze_bundle(&bundle_of("m", &layers), &config).unwrap()).unwrap();
    let b = detect_complementary(&analyze_bundle(&bundle_of("m", &swapped), &config).unwrap()).unwrap();
    for (x, y) in a.layers.iter().zip(&b.layers) {
        assert_eq!(x.strength, y.strength, "layer {}", x.layer);
    }
    assert_eq!(a.strength(3), Some(Complementarity::Strict));
    assert_eq!(a.strength(1), Some(Complementarity::None));
}

#[test]
fn multi_kernel_layers_refuse_complementarity() {
    let bundle = KernelBundle::from_kernels("rand", random_bundle(3, 2, 2, 32)).unwrap();
    let reports = analyze_bundle(&bundle, &RunConfig::default()).unwrap();
    assert!(detect_complementary(&reports).unwrap_err().to_string().contains("redundancy"));
}

#[test]
fn diff_is_antisymmetric() {
    let config = RunConfig::default();
    let before = KernelBundle::from_kernels("a", random_bundle(4, 6, 1, 80)).unwrap();
    let after = KernelBundle::from_kernels("b", random_bundle(5, 6, 1, 80)).unwrap();
    let forward = diff_bundles(&before, &after, &config).unwrap();
    let backward = diff_bundles(&after, &before, &config).unwrap();
    for (x, y) in forward.kernels.iter().zip(&backward.kernels) {
        assert_eq!((x.layer, x.direction), (y.layer, y.direction));
        assert!((x.delta_sc + y.delta_sc).abs() < 1e-15);
    }
}

#[test]
fn identity_diff_is_quiet() {
    let config = RunConfig::default();
    let bundle = KernelBundle::from_kernels("a", random_bundle(6, 4, 1, 64)).unwrap();
    let report = diff_bundles(&bundle, &bundle, &config).unwrap();
    assert!(report.kernels.iter().all(|k| !k.shifted_high && k.delta_sc == 0.0));
    assert!(report.early_layers_shifted.is_empty());
}

#[test]
fn low_to_high_synth_shift() {
    let config = RunConfig::default();
    let before = bundle_of("pre", &[(low_pass(), low_pass()), (low_pass(), low_pass())]);
    let after = bundle_of("ft", &[(high_pass(), low_pass()), (low_pass(), low_pass())]);
    let report = diff_bundles(&before, &after, &config).unwrap();
    let k = report.get(1, Direction::Forward, 0).unwrap();
    assert!(k.shifted_high);
    assert_eq!((k.class_before, k.class_after), (Verdict::LowPass, Verdict::HighPass));
    assert_eq!(report.early_layers_shifted, vec![1]);
}

#[test]
fn topology_mismatch_names_divergence() {
    let config = RunConfig::default();
    let a = bundle_of("a", &[(low_pass(), low_pass())]);
    let b = bundle_of("b", &[(low_pass(), low_pass()), (low_pass(), low_pass())]);
    let err = diff_bundles(&a, &b, &config).unwrap_err().to_string();
    assert!(err.contains("layer"), "{err}");
}

#[test]
fn redundancy_is_symmetric_and_scale_invariant() {
    let mut r = rng(8);
    for _ in 0..20 {
        let a = Kernel::from_values(random_values(&mut r, 50)).unwrap();
        let b = Kernel::from_values(random_values(&mut r, 50)).unwrap();
        let s = spectral_cosine(&a, &b);
        assert!((s - spectral_cosine(&b, &a)).abs() < 1e-15);
        assert!((s - spectral_cosine(&a.scaled(7.5).unwrap(), &b)).abs() < 1e-12);
        assert!((0.0..=1.0 + 1e-12).contains(&s));
    }
}

#[test]
fn redundancy_pairs_cover_every_combination() {
    let bundle = KernelBundle::from_kernels("rand", random_bundle(9, 2, 4, 40)).unwrap();
    let pairs = analyze_redundancy(&bundle, &RunConfig::default()).unwrap();
    // 2 layers × 2 directions × C(4, 2)
    assert_eq!(pairs.len(), 24);
    assert!(pairs.iter().all(|p| p.first < p.second && p.redundant == (p.similarity >= 0.95)));
    let single = bundle_of("m", &[(low_pass(), low_pass())]);
    assert!(analyze_redundancy(&single, &RunConfig::default()).is_err());
}

#[test]
fn degenerate_kernel_analysis() {
    let zero = Kernel::from_values(vec![0.0; 16]).unwrap();
    assert_eq!(analyze_kernel(&zero, &RunConfig::default()).unwrap(), KernelOutcome::Degenerate);
}
