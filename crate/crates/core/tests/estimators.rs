//! ACF, MFDFA and MFDCCA against generators with analytically known
//! correlation and scaling properties.

use mfitt::acf::{acf, linear_lags, AcfEstimator};
use mfitt::grid::log_spaced_integers;
use mfitt::mfdcca::{rho_q, rolling_rho};
use mfitt::mfdfa::{fit_hurst, fluctuation_surface, min_scale, singularity_spectrum, FluctuationSurface, MfdfaConfig};
use mfitt::synth::{
    cascade_analytic_alpha, cascade_analytic_hq, generate, shuffle_surrogate, GeneratorKind, GeneratorSpec,
};

const N20: usize = 1 << 20;

fn series(kind: GeneratorKind, n: usize, seed: u64) -> Vec<f64> {
    generate(&GeneratorSpec::new(kind, n, seed)).unwrap()
}

#[test]
fn acf_of_white_noise_is_within_noise_bound() {
    let n = 1_000_000;
    let x = series(GeneratorKind::White, n, 101);
    let bound = 4.0 / (n as f64).sqrt();
    let r = acf(&x, &linear_lags(100), AcfEstimator::Standard, 1.0).unwrap();
    assert!(r.c.iter().all(|c| c.abs() < bound));
}

#[test]
fn acf_of_ar1_and_its_shuffle() {
    let n = 1_000_000;
    let x = series(GeneratorKind::Ar1 { phi: 0.5 }, n, 102);
    let r = acf(&x, &linear_lags(10), AcfEstimator::Standard, 1.0).unwrap();
    for (&k, &c) in r.lags.iter().zip(&r.c) {
        assert!((c - 0.5f64.powi(k as i32)).abs() < 0.01, "k={k} C={c}");
    }
    let shuffled = shuffle_surrogate(&x, 103);
    let bound = 4.0 / (n as f64).sqrt();
    let r = acf(&shuffled, &linear_lags(100), AcfEstimator::Standard, 1.0).unwrap();
    assert!(r.c.iter().all(|c| c.abs() < bound));
}

#[test]
fn acf_peaks_at_embedded_period() {
    // a block repeated with period k0 correlates most strongly at lag k0
    let k0 = 37;
    let block = series(GeneratorKind::White, k0, 104);
    let noise = series(GeneratorKind::White, 20_000, 105);
    let x: Vec<f64> = (0..20_000).map(|i| block[i % k0] + 0.3 * noise[i]).collect();
    let r = acf(&x, &linear_lags(60), AcfEstimator::Standard, 1.0).unwrap();
    let best = r.lags.iter().zip(&r.c).max_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap();
    assert_eq!(*best.0, k0);
}

#[test]
fn white_noise_dfa_exponent() {
    let x = series(GeneratorKind::White, N20, 106);
    let cfg = MfdfaConfig::<f64>::default().with_q(&[2.0]).with_scales(log_spaced_integers(10, N20 / 10, 20));
    let h = fit_hurst(&fluctuation_surface(&x, &cfg).unwrap(), (100, 100_000)).unwrap();
    assert!((h.at(2.0).unwrap() - 0.5).abs() < 0.03, "h(2) = {:?}", h.at(2.0));
}

#[test]
fn fgn_hurst_and_fluctuation_ordering() {
    let x = series(GeneratorKind::Fgn { hurst: 0.7 }, N20, 107);
    let cfg = MfdfaConfig::<f64>::default().with_scales(log_spaced_integers(10, N20 / 10, 20));
    let surface = fluctuation_surface(&x, &cfg).unwrap();
    let ns = surface.scales.len();
    for qi in 1..surface.q_grid.len() {
        for si in 0..ns {
            assert!(surface.get(qi, si) >= surface.get(qi - 1, si) * (1.0 - 1e-12));
        }
    }
    let h = fit_hurst(&surface, (100, 100_000)).unwrap();
    assert!((h.at(2.0).unwrap() - 0.7).abs() < 0.03);
    // slopes of monotone curves need not be monotone; for a monofractal the
    // residual wiggle of h(q) is sampling noise
    assert!(h.monotonicity_violation() < 1e-3);
}

#[test]
fn exact_power_law_surface() {
    let scales = log_spaced_integers(10, 10_000, 10);
    let q_grid = vec![-2.0, 0.0, 2.0];
    let f = q_grid
        .iter()
        .flat_map(|q| scales.iter().map(move |&s| (3.0 - 0.1 * q) * (s as f64).powf(0.7 - 0.05 * q)))
        .collect();
    let surface = FluctuationSurface {
        q_grid: q_grid.clone(),
        segment_counts: vec![0; scales.len()],
        skipped_segments: vec![0; scales.len()],
        scales,
        f,
    };
    let h = fit_hurst(&surface, (10, 10_000)).unwrap();
    for (i, &q) in q_grid.iter().enumerate() {
        assert!((h.h[i] - (0.7 - 0.05 * q)).abs() < 1e-12);
        assert!((h.fit_r2[i] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn polynomial_trends_below_degree_leave_surface_unchanged() {
    let x = series(GeneratorKind::Fgn { hurst: 0.6 }, 20_000, 108);
    for m in 1..=3usize {
        let cfg =
            MfdfaConfig::<f64>::default().with_q(&[-3.0, 0.0, 2.0]).with_scales(vec![10, 40, 200, 1000]).with_degree(m);
        let base = fluctuation_surface(&x, &cfg).unwrap();
        // a degree m-1 trend in the values is a degree m trend in every profile
        let trended: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let u = i as f64 / 20_000.0;
                v + 0.7 - 0.4 * u + if m >= 3 { 0.9 * u * u } else { 0.0 }
            })
            .collect();
        let trended = if m == 1 { x.iter().map(|v| v + 0.7).collect() } else { trended };
        let moved = fluctuation_surface(&trended, &cfg).unwrap();
        for (a, b) in base.f.iter().zip(&moved.f) {
            assert!((a - b).abs() <= 1e-8 * a, "m={m}: {a} vs {b}");
        }
    }
}

#[test]
fn reversal_changes_surface_only_at_profile_offset_order() {
    // Reversing a segment reflects its profile up to a one-sample shift, so
    // F changes by O(1/s) rather than being invariant.
    let x = series(GeneratorKind::Fgn { hurst: 0.7 }, 20_000, 109);
    let r: Vec<f64> = x.iter().rev().copied().collect();
    let cfg = MfdfaConfig::<f64>::default().with_q(&[-2.0, 2.0]).with_scales(vec![20, 100, 500, 2000]);
    let a = fluctuation_surface(&x, &cfg).unwrap();
    let b = fluctuation_surface(&r, &cfg).unwrap();
    assert_eq!(a.segment_counts, b.segment_counts);
    for (qi, _) in a.q_grid.iter().enumerate() {
        for (si, &s) in a.scales.iter().enumerate() {
            let rel = (a.get(qi, si) - b.get(qi, si)).abs() / a.get(qi, si);
            assert!(rel < 2.0 / s as f64, "s={s}: {rel}");
        }
    }
}

#[test]
fn cascade_generalized_hurst_and_spectrum() {
    let x: Vec<f64> = generate(&GeneratorSpec::cascade(0.3, 16, 7)).unwrap();
    let n = x.len();
    let cfg = MfdfaConfig::<f64>::default().with_scales(log_spaced_integers(4, n / 10, 20));
    let h = fit_hurst(&fluctuation_surface(&x, &cfg).unwrap(), (10, n / 10)).unwrap();
    for (&q, &hq) in h.q_grid.iter().zip(&h.h) {
        if q != 0.0 {
            let want = cascade_analytic_hq(0.3, q).unwrap();
            assert!((hq - want).abs() < 0.05, "q={q}: {hq} vs {want}");
        }
    }
    assert!(h.monotonicity_violation() < 1e-6);
    let spec = singularity_spectrum(&h).unwrap();
    assert!((spec.alpha_min() + 0.7f64.log2()).abs() < 0.08);
    assert!((spec.alpha_max() + 0.3f64.log2()).abs() < 0.08);
    // the binomial cascade spectrum is symmetric: α(q) + α(−q) = 2α(0)
    let a = |q| cascade_analytic_alpha(0.3, q).unwrap();
    assert!((a(4.0) + a(-4.0) - 2.0 * a(0.0)).abs() < 1e-12);
    assert!(spec.asymmetry.unwrap().abs() < 0.1);
}

#[test]
fn min_scale_on_bernoulli_mask() {
    let u = series(GeneratorKind::WeibullRenewal { alpha: 1.0, x0: 1.0 }, 1_000_000, 111);
    // P(E > ln(1/0.4)) = 0.4
    let threshold = (1.0f64 / 0.4).ln();
    let x: Vec<f64> = u.iter().map(|&e| if e > threshold { 0.0 } else { 1.0 + e }).collect();
    let mut longest = 0;
    let mut run = 0;
    for v in &x {
        run = if *v == 0.0 { run + 1 } else { 0 };
        longest = longest.max(run);
    }
    assert!(longest > 5);
    assert_eq!(min_scale(&x, 2).unwrap(), longest + 1);
}

#[test]
fn rho_affine_invariance() {
    let x = series(GeneratorKind::White, 50_000, 112);
    let z = series(GeneratorKind::White, 50_000, 113);
    let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 0.6 * a + b).collect();
    let cfg = MfdfaConfig::<f64>::default().with_q(&[0.5, 2.0, 4.0]).with_scales(vec![10, 50, 200, 1000]);
    let base = rho_q(&x, &y, &cfg).unwrap();
    let moved: Vec<f64> = y.iter().map(|v| 3.5 * v + 12.0).collect();
    let other = rho_q(&x, &moved, &cfg).unwrap();
    for (a, b) in base.iter().zip(&other) {
        for (u, v) in a.rho.iter().zip(&b.rho) {
            assert!((u - v).abs() < 1e-9);
        }
    }
}

#[test]
fn rolling_rho_tracks_a_switch() {
    let n = 200_000;
    let x = series(GeneratorKind::White, n, 114);
    let z = series(GeneratorKind::White, n, 115);
    let y: Vec<f64> = (0..n).map(|i| if i < n / 2 { x[i] } else { z[i] }).collect();
    let t: Vec<f64> = (0..n).map(|i| 10.0 * i as f64).collect();
    let window = 10.0 * 20_000.0;
    let r = rolling_rho(&x, &y, &t, 10.0, 2.0, 60, 2, window, window / 2.0).unwrap();
    for (&end, rho) in r.window_end_times.iter().zip(&r.rho) {
        let rho = rho.unwrap();
        let start = end - window;
        if end <= 10.0 * (n / 2) as f64 {
            assert!((rho - 1.0).abs() < 1e-12);
        } else if start >= 10.0 * (n / 2) as f64 {
            assert!(rho.abs() < 0.1, "window ending {end}: {rho}");
        }
    }
}
