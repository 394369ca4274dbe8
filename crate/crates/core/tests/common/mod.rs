//! Independent reference implementations used as test oracles. None of these
//! call into the library's numerics.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Sample covariance (n − 1) of row vectors.
pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let mut c = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    for row in &mut c {
        for v in row.iter_mut() {
            *v /= (n - 1) as f64;
        }
    }
    c
}

/// Mean of isotropic Gaussian kernels, summed term by term.
pub fn kernel_density(support: &[Vec<f64>], bandwidth: f64, x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let norm = (2.0 * PI * bandwidth * bandwidth).powf(-d / 2.0);
    support
        .iter()
        .map(|s| {
            let r2: f64 = s.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            norm * (-r2 / (2.0 * bandwidth * bandwidth)).exp()
        })
        .sum::<f64>()
        / support.len() as f64
}

/// Index of the nearest centroid (lowest index on ties).
pub fn nearest_centroid(centroids: &[Vec<f64>], x: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Log-likelihood of data under a diagonal Gaussian mixture, computed directly.
pub fn mixture_log_likelihood(weights: &[f64], means: &[Vec<f64>], vars: &[Vec<f64>], data: &[Vec<f64>]) -> f64 {
    data.iter()
        .map(|x| {
            let p: f64 = (0..weights.len())
                .map(|c| {
                    let mut dens = weights[c];
                    for j in 0..x.len() {
                        let v = vars[c][j];
                        dens *= (-(x[j] - means[c][j]).powi(2) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
                    }
                    dens
                })
                .sum();
            p.ln()
        })
        .sum()
}

/// `2·(k·2d + k − 1) − 2·LL`.
pub fn aic(k: usize, d: usize, log_likelihood: f64) -> f64 {
    2.0 * (k * 2 * d + k - 1) as f64 - 2.0 * log_likelihood
}

/// Lanczos approximation of ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Student-t density.
pub fn t_density(t: f64, df: f64) -> f64 {
    let ln_c = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * PI).ln();
    (ln_c - (df + 1.0) / 2.0 * (1.0 + t * t / df).ln()).exp()
}

/// Two-sided tail probability by composite Simpson integration of the density.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    let a = t.abs();
    let n = 200_000;
    let h = a / n as f64;
    let mut s = t_density(0.0, df) + t_density(a, df);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * t_density(i as f64 * h, df);
    }
    let central = s * h / 3.0;
    (1.0 - 2.0 * central).max(0.0)
}

/// Welch statistic and degrees of freedom from the textbook formulas.
pub fn welch(a: &[f64], b: &[f64]) -> (f64, f64) {
    let m = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64]| {
        let mu = m(v);
        v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    let (sa, sb) = (var(a) / a.len() as f64, var(b) / b.len() as f64);
    let t = (m(a) - m(b)) / (sa + sb).sqrt();
    let df = (sa + sb).powi(2) / (sa * sa / (a.len() - 1) as f64 + sb * sb / (b.len() - 1) as f64);
    (t, df)
}

/// 3×3 per-channel cell averages of an `h × w` RGB buffer, quantized to 4 levels.
pub fn pooled_key(pixels: &[f32], h: usize, w: usize) -> Vec<u8> {
    let mut key = Vec::with_capacity(27);
    for cr in 0..3 {
        for cc in 0..3 {
            let rows = (cr * h / 3)..((cr + 1) * h / 3);
            let cols = (cc * w / 3)..((cc + 1) * w / 3);
            for ch in 0..3 {
                let mut sum = 0.0f64;
                let mut n = 0usize;
                for r in rows.clone() {
                    for c in cols.clone() {
                        sum += pixels[(r * w + c) * 3 + ch] as f64;
                        n += 1;
                    }
                }
                let v = (sum / n as f64).min(1.0 - 1e-9);
                key.push((v * 4.0).floor() as u8);
            }
        }
    }
    key
}

/// Bandit draw probabilities straight from the formula.
pub fn bandit(alps: &[f64], temperature: f64) -> Vec<f64> {
    let c = alps.len() as f64;
    let powered: Vec<f64> = alps.iter().map(|a| a.powf(temperature)).collect();
    let total: f64 = powered.iter().sum();
    powered.iter().map(|p| 0.8 * p / total + 0.2 / c).collect()
}
pub mod examples;
