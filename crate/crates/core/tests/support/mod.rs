//! Independent oracles and fixtures shared by the integration tests.
//!
//! Nothing here calls the code under test except the fixture builders, which
//! only assemble bundles from kernels.

#![allow(dead_code)]

use std::f64::consts::PI;

use kernelscope::kernel_lab::{synth_kernel, SynthSpec};
use kernelscope::{Direction, FilterClass, Kernel, KernelBundle, Mode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two-sided DFT by direct summation, `X[k] = Σ x[n] e^{-2πikn/N}`.
pub fn naive_dft(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    // Twiddles by table so that phase error does not grow with k·n.
    let table: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n as f64))
        .collect();
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(t, &x)| table[(k * t) % n] * x)
                .sum()
        })
        .collect()
}

/// One-sided magnitudes, bins `0..=N/2`.
pub fn naive_magnitudes(values: &[f64]) -> Vec<f64> {
    let full = naive_dft(values);
    full[..values.len() / 2 + 1].iter().map(|c| c.norm()).collect()
}

/// Impulse response of the discretized diagonal system by stepping its state:
/// `x_0 = 1`, `x_{l+1} = ā·x_l`, `y_l = Re(c·b̄·x_l)`, summed over modes.
pub fn s4d_recurrence(modes: &[Mode], step: f64, length: usize) -> Vec<f64> {
    let mut out = vec![0.0; length];
    for m in modes {
        let a_bar = (m.pole * step).exp();
        let b_bar = (a_bar - 1.0) / m.pole;
        let mut x = Complex64::new(1.0, 0.0);
        for y in out.iter_mut() {
            *y += (m.coefficient * b_bar * x).re;
            x *= a_bar;
        }
    }
    out
}

/// Random stable diagonal modes.
pub fn random_modes(rng: &mut ChaCha8Rng, count: usize) -> Vec<Mode> {
    (0..count)
        .map(|_| Mode {
            pole: Complex64::new(-rng.gen_range(0.05..2.0), rng.gen_range(-10.0..10.0)),
            coefficient: Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        })
        .collect()
}

/// Whether `conv(a)` and `conv(b)` intersect, decided as feasibility of
///
/// ```text
/// Σ λ_i a_i − Σ μ_j b_j = 0,  Σ λ = 1,  Σ μ = 1,  λ, μ ≥ 0
/// ```
///
/// by a phase-one simplex with Bland's rule. Feasible when the artificial
/// objective reaches zero.
pub fn hulls_intersect(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    phase_one_residual(a, b) <= 1e-9
}

pub fn phase_one_residual(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let d = a[0].len();
    let (na, nb) = (a.len(), b.len());
    let vars = na + nb;
    let rows = d + 2;
    let cols = vars + rows;
    // Tableau rows: constraint coefficients followed by the right-hand side.
    let mut t = vec![vec![0.0; cols + 1]; rows];
    for k in 0..d {
        for (i, p) in a.iter().enumerate() {
            t[k][i] = p[k];
        }
        for (j, q) in b.iter().enumerate() {
            t[k][na + j] = -q[k];
        }
    }
    t[d][..na].iter_mut().for_each(|v| *v = 1.0);
    t[d][cols] = 1.0;
    t[d + 1][na..vars].iter_mut().for_each(|v| *v = 1.0);
    t[d + 1][cols] = 1.0;
    for (r, row) in t.iter_mut().enumerate() {
        row[vars + r] = 1.0;
    }
    let mut basis: Vec<usize> = (vars..vars + rows).collect();

    // Reduced costs of the artificial objective.
    let mut cost = vec![0.0; cols + 1];
    for row in &t {
        for c in 0..vars {
            cost[c] -= row[c];
        }
        cost[cols] -= row[cols];
    }

    let eps = 1e-11;
    for _ in 0..10_000 {
        let Some(enter) = (0..cols).find(|&c| cost[c] < -eps) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..rows {
            if t[r][enter] > eps {
                let ratio = t[r][cols] / t[r][enter];
                let better = match leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < best - 1e-14 || (ratio <= best + 1e-14 && basis[r] < basis[lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            break;
        };
        let pivot = t[pr][enter];
        t[pr].iter_mut().for_each(|v| *v /= pivot);
        let pivot_row = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != pr && row[enter] != 0.0 {
                let f = row[enter];
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
        let f = cost[enter];
        cost.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
        basis[pr] = enter;
    }
    -cost[cols]
}

pub fn low_pass() -> Kernel {
    synth_kernel(&SynthSpec::low_pass(0.05, 256)).unwrap()
}

pub fn high_pass() -> Kernel {
    synth_kernel(&SynthSpec::high_pass(0.45, 256)).unwrap()
}

pub fn band_pass() -> Kernel {
    synth_kernel(&SynthSpec::band_pass(0.2, 0.3, 256)).unwrap()
}

pub fn synth(class: FilterClass) -> Kernel {
    match class {
        FilterClass::LowPass => low_pass(),
        FilterClass::HighPass => high_pass(),
        FilterClass::BandPass => band_pass(),
    }
}

/// One forward and one backward kernel per layer, layers numbered from 1.
pub fn bundle_of(tag: &str, layers: &[(Kernel, Kernel)]) -> KernelBundle {
    let mut kernels = Vec::new();
    for (i, (fwd, bwd)) in layers.iter().enumerate() {
        let layer = i as u32 + 1;
        kernels.push(fwd.clone().relabel(layer, Direction::Forward, 0).unwrap());
        kernels.push(bwd.clone().relabel(layer, Direction::Backward, 0).unwrap());
    }
    KernelBundle::from_kernels(tag, kernels).unwrap()
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
