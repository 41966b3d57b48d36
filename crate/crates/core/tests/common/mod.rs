//! Reference implementations and data builders shared by the test targets.
//! The naive routines share no code with the library: explicit profiles,
//! normal-equation polynomial fits on raw positions and literal counting.

#![allow(dead_code)]

use mfitt::deseason::{day_of_week, hour_of_day};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EPOCH_2017: i64 = 1_483_228_800;

/// Deterministic uniform values on [-1, 3).
pub fn sample(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 1.0
        })
        .collect()
}

/// Least-squares polynomial of degree m through (i, y_i), i = 1..=len, by the
/// normal equations and Gauss-Jordan elimination with partial pivoting.
pub fn poly_fit(y: &[f64], m: usize) -> Vec<f64> {
    let k = m + 1;
    let mut a = vec![vec![0.0; k + 1]; k];
    for (i, &yi) in y.iter().enumerate() {
        let x = (i + 1) as f64;
        for r in 0..k {
            for c in 0..k {
                a[r][c] += x.powi((r + c) as i32);
            }
            a[r][k] += yi * x.powi(r as i32);
        }
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..k).map(|r| a[r][k] / a[r][r]).collect()
}

pub fn detrended(segment: &[f64], m: usize) -> Vec<f64> {
    let mut profile = Vec::new();
    let mut acc = 0.0;
    for v in segment {
        acc += v;
        profile.push(acc);
    }
    let c = poly_fit(&profile, m);
    profile
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let x = (i + 1) as f64;
            y - c.iter().enumerate().map(|(p, ci)| ci * x.powi(p as i32)).sum::<f64>()
        })
        .collect()
}

pub fn segments(n: usize, s: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for v in 0..n / s {
        out.push(v * s);
    }
    for v in 0..n / s {
        out.push(n - (v + 1) * s);
    }
    out
}

pub fn naive_cross(x: &[f64], y: &[f64], s: usize, m: usize, q: f64) -> f64 {
    let covs: Vec<f64> = segments(x.len(), s)
        .into_iter()
        .map(|st| {
            let rx = detrended(&x[st..st + s], m);
            let ry = detrended(&y[st..st + s], m);
            rx.iter().zip(&ry).map(|(a, b)| a * b).sum::<f64>() / s as f64
        })
        .collect();
    let n = covs.len() as f64;
    if q == 0.0 {
        let sign = covs.iter().sum::<f64>().signum();
        sign * (covs.iter().map(|c| c.abs().ln()).sum::<f64>() / (2.0 * n)).exp()
    } else {
        let mean = covs.iter().map(|c| c.signum() * c.abs().powf(q / 2.0)).sum::<f64>() / n;
        mean.signum() * mean.abs().powf(1.0 / q)
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// q values exercised by the naive comparisons.
pub const QS: [f64; 7] = [-3.0, -1.0, -0.5, 0.0, 1.0, 2.0, 3.5];

/// Complementary ECDF at `v` by counting, with the largest value counted
/// inclusively.
pub fn naive_ccdf(x: &[f64], v: f64) -> f64 {
    let max = x.iter().copied().fold(f64::MIN, f64::max);
    let count = if v == max { x.iter().filter(|&&u| u >= v).count() } else { x.iter().filter(|&&u| u > v).count() };
    count as f64 / x.len() as f64
}

pub fn hourly_profile(h: usize) -> f64 {
    1.0 + 0.6 * (2.0 * std::f64::consts::PI * h as f64 / 24.0).sin()
}

/// Minute samples over `weeks` weeks: hourly profile × weekend factor ×
/// uniform noise on [0.5, 1.5], with roughly 10% exact zeros.
pub fn seasonal_series(weeks: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let n = weeks * 7 * 1440;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = EPOCH_2017 as f64 + 1800.0;
    let t: Vec<f64> = (0..n).map(|i| start + 60.0 * i as f64).collect();
    let x = t
        .iter()
        .enumerate()
        .map(|(i, &ti)| {
            let e = 0.5 + rng.random::<f64>();
            if (i * 7919) % 10 == 0 {
                0.0
            } else {
                let weekend = if day_of_week(ti) >= 5 { 2.0 } else { 1.0 };
                hourly_profile(hour_of_day(ti)) * weekend * e
            }
        })
        .collect();
    (x, t)
}

pub fn hourly_means(x: &[f64], t: &[f64]) -> Vec<f64> {
    let mut sum = [0.0; 24];
    let mut count = [0usize; 24];
    for (&v, &ti) in x.iter().zip(t) {
        sum[hour_of_day(ti)] += v;
        count[hour_of_day(ti)] += 1;
    }
    sum.iter().zip(&count).map(|(s, c)| s / *c as f64).collect()
}

/// `(max − min) / mean`.
pub fn relative_spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::MIN, f64::max);
    let min = v.iter().copied().fold(f64::MAX, f64::min);
    (max - min) / (v.iter().sum::<f64>() / v.len() as f64)
}
