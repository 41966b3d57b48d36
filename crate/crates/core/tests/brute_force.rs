//! Small-input equivalence against direct textbook implementations that share
//! no code with the library.

mod common;

use common::{naive_ccdf, naive_cross, rel, sample, QS};
use mfitt::dist::ecdf_complementary;
use mfitt::mfdcca::cross_fluctuation;
use mfitt::mfdfa::{fluctuation_surface, MfdfaConfig};
use mfitt::series::compute_stats;

#[test]
fn fluctuation_surface_matches_naive() {
    let x = sample(40, 1);
    for m in 1..=3 {
        let scales: Vec<usize> = [5usize, 7, 10, 13].into_iter().filter(|&s| s >= m + 2).collect();
        let cfg = MfdfaConfig::<f64>::default().with_q(&QS).with_scales(scales.clone()).with_degree(m);
        let surf = fluctuation_surface(&x, &cfg).unwrap();
        for (qi, &q) in QS.iter().enumerate() {
            for (si, &s) in scales.iter().enumerate() {
                let want = naive_cross(&x, &x, s, m, q);
                let got = surf.get(qi, si);
                assert!(rel(got, want) < 1e-10, "m={m} q={q} s={s}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn spec_tiny_case() {
    // N = 40, s = 10, q = 2, m = 1
    let x = sample(40, 2);
    let cfg = MfdfaConfig::<f64>::default().with_q(&[2.0]).with_scales(vec![10]).with_degree(1);
    let got = fluctuation_surface(&x, &cfg).unwrap().get(0, 0);
    assert!(rel(got, naive_cross(&x, &x, 10, 1, 2.0)) < 1e-10);
}

#[test]
fn cross_fluctuation_matches_naive() {
    let x = sample(40, 3);
    let y: Vec<f64> = sample(40, 4).iter().zip(&x).map(|(a, b)| a - 0.3 * b).collect();
    for m in 1..=2 {
        let scales = vec![5, 8, 10, 13];
        let cfg = MfdfaConfig::<f64>::default().with_q(&QS).with_scales(scales.clone()).with_degree(m);
        let surf = cross_fluctuation(&x, &y, &cfg).unwrap();
        for (qi, &q) in QS.iter().enumerate() {
            for (si, &s) in scales.iter().enumerate() {
                let want = naive_cross(&x, &y, s, m, q);
                let got = surf.get(qi, si);
                assert!(rel(got, want) < 1e-10, "m={m} q={q} s={s}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn ecdf_matches_counting() {
    let mut x = sample(40, 5);
    // force ties
    x[3] = x[7];
    x[11] = x[7];
    let curve = ecdf_complementary(&x).unwrap();
    for (&xv, &p) in curve.x.iter().zip(&curve.p) {
        assert_eq!(p, naive_ccdf(&x, xv));
    }
    let mut distinct = x.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    assert_eq!(curve.x, distinct);
}

#[test]
fn stats_match_two_pass() {
    let mut x = sample(40, 6);
    x[0] = 0.0;
    x[9] = 0.0;
    let st = compute_stats(&x).unwrap();
    let mean = x.iter().sum::<f64>() / 40.0;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 40.0;
    assert!(rel(st.mean, mean) < 1e-10);
    assert!(rel(st.std, var.sqrt()) < 1e-10);
    assert_eq!(st.count, 40);
    assert_eq!(st.zero_fraction, 2.0 / 40.0);
}
