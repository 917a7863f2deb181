//! Small numeric helpers shared across modules.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance with the n-1 divisor; 0 for fewer than two values.
pub fn sample_variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

/// Standard error of the mean: sample sd / sqrt(len).
pub fn standard_error(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    (sample_variance(v) / v.len() as f64).sqrt()
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

pub fn mse(pred: &[f64], truth: &[f64]) -> f64 {
    pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / truth.len() as f64
}

/// Sample covariance (n-1 divisor) of equal-length observation vectors.
pub fn sample_covariance(obs: &[Vec<f64>]) -> DMatrix<f64> {
    let d = obs.first().map_or(0, Vec::len);
    let n = obs.len();
    let mut cov = DMatrix::zeros(d, d);
    if n < 2 {
        return cov;
    }
    let mut centre = vec![0.0; d];
    for o in obs {
        for (c, v) in centre.iter_mut().zip(o) {
            *c += v;
        }
    }
    centre.iter_mut().for_each(|c| *c /= n as f64);
    let mut dev = vec![0.0; d];
    for o in obs {
        for i in 0..d {
            dev[i] = o[i] - centre[i];
        }
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] += dev[i] * dev[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / (n - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    cov
}

/// Symmetrize and clamp negative eigenvalues to zero.
pub fn clamp_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    if sym.nrows() == 0 {
        return sym;
    }
    let eig = SymmetricEigen::new(sym.clone());
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return sym;
    }
    let lambda = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0)));
    let out = &eig.eigenvectors * lambda * eig.eigenvectors.transpose();
    (&out + out.transpose()) * 0.5
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Upper tail of the chi-squared distribution.
pub fn chi2_sf(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64)
        .map(|d| d.sf(x))
        .unwrap_or(f64::NAN)
        .clamp(0.0, 1.0)
}

/// Kolmogorov-Smirnov distance between a sample and Uniform(0, 1).
pub fn ks_uniform_distance(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            ((i as f64 + 1.0) / n - x).max(x - i as f64 / n)
        })
        .fold(0.0, f64::max)
}
