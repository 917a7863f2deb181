use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::{fit_grouped_forest, Forest, ForestParams, Scheme};
use crate::stats::{clamp_psd, normal_quantile, sample_covariance};

/// How the between-group term is estimated from group means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaOneEstimator {
    /// Sample covariance of group means. Biased upward by
    /// `within / n_mc`, which matters when `n_mc` is small.
    Raw,
    /// Raw minus the average within-group covariance divided by `n_mc`.
    #[default]
    BiasCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupDesign {
    pub n_z: usize,
    pub n_mc: usize,
    #[serde(default)]
    pub zeta1: ZetaOneEstimator,
}

impl Default for GroupDesign {
    fn default() -> Self {
        Self {
            n_z: 50,
            n_mc: 20,
            zeta1: ZetaOneEstimator::default(),
        }
    }
}

impl GroupDesign {
    pub fn new(n_z: usize, n_mc: usize) -> Self {
        Self {
            n_z,
            n_mc,
            ..Self::default()
        }
    }

    pub fn trees(&self) -> usize {
        self.n_z * self.n_mc
    }

    pub(crate) fn check(&self, params: &ForestParams) -> Result<()> {
        if params.scheme == Scheme::Bootstrap {
            return Err(Error::SchemeUnsupported(params.scheme.to_string()));
        }
        if self.n_z < 2 || self.n_mc < 2 {
            return Err(Error::TooFewGroups {
                n_z: self.n_z,
                n_mc: self.n_mc,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentsMeta {
    pub n: usize,
    pub k: usize,
    pub n_z: usize,
    pub n_mc: usize,
}

/// Mean and covariance of forest predictions over a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub points: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub cov: DMatrix<f64>,
    pub meta: MomentsMeta,
}

impl Moments {
    pub fn variance(&self, i: usize) -> f64 {
        self.cov[(i, i)]
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Two-term grouped covariance from per-tree prediction vectors laid out
/// group-major (`tree_preds[g * n_mc + m]`).
pub(crate) fn grouped_covariance(
    tree_preds: &[Vec<f64>],
    design: &GroupDesign,
    n: usize,
    k: usize,
) -> DMatrix<f64> {
    let (n_z, n_mc) = (design.n_z, design.n_mc);
    let d = tree_preds.first().map_or(0, Vec::len);
    let groups: Vec<&[Vec<f64>]> = tree_preds.chunks(n_mc).collect();
    let group_means: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let mut m = vec![0.0; d];
            for t in g.iter() {
                for (a, v) in m.iter_mut().zip(t) {
                    *a += v;
                }
            }
            m.iter_mut().for_each(|a| *a /= n_mc as f64);
            m
        })
        .collect();
    let mut zeta1 = sample_covariance(&group_means);
    if design.zeta1 == ZetaOneEstimator::BiasCorrected {
        let mut within = DMatrix::zeros(d, d);
        for g in &groups {
            within += sample_covariance(g);
        }
        within /= n_z as f64;
        zeta1 -= within / n_mc as f64;
    }
    let zeta_k = sample_covariance(tree_preds);
    let b = tree_preds.len() as f64;
    let sigma = zeta1 * ((k * k) as f64 / n as f64) + zeta_k / b;
    clamp_psd(&sigma)
}

/// Fit an anchored-group forest of `n_z * n_mc` trees (overriding
/// `params.b`) and estimate prediction moments at `points`.
pub fn estimate_moments(
    ds: &Dataset,
    params: &ForestParams,
    points: &[Vec<f64>],
    design: GroupDesign,
) -> Result<(Forest, Moments)> {
    design.check(params)?;
    let forest = fit_grouped_forest(ds, params, design.n_z, design.n_mc)?;
    let moments = grouped_moments(&forest, points, design.zeta1)?;
    Ok((forest, moments))
}

/// Moments at `points` from a forest already fitted in anchored groups.
pub fn grouped_moments(forest: &Forest, points: &[Vec<f64>], zeta1: ZetaOneEstimator) -> Result<Moments> {
    let groups = forest
        .groups
        .as_ref()
        .ok_or_else(|| Error::InvalidParam("forest was not fitted in anchored groups".into()))?;
    let design = GroupDesign {
        n_z: groups.n_z,
        n_mc: groups.n_mc,
        zeta1,
    };
    let n = forest.n_train;
    let k = forest.params.resolved_k(n)?;
    let preds = forest.tree_predictions(points)?;
    Ok(Moments {
        points: points.to_vec(),
        mean: forest.predict_many(points)?,
        cov: grouped_covariance(&preds, &design, n, k),
        meta: MomentsMeta {
            n,
            k,
            n_z: design.n_z,
            n_mc: design.n_mc,
        },
    })
}

/// Normal interval `m_i +/- z * sqrt(Sigma_ii)`.
pub fn confidence_interval(mom: &Moments, i: usize, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::LevelOutOfRange(level));
    }
    if i >= mom.dim() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: mom.dim(),
        });
    }
    let z = normal_quantile((1.0 + level) / 2.0);
    let half = z * mom.variance(i).max(0.0).sqrt();
    Ok((mom.mean[i] - half, mom.mean[i] + half))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments_1d(mean: f64, var: f64) -> Moments {
        Moments {
            points: vec![vec![0.0]],
            mean: vec![mean],
            cov: DMatrix::from_element(1, 1, var),
            meta: MomentsMeta { n: 1, k: 1, n_z: 2, n_mc: 2 },
        }
    }

    #[test]
    fn standard_interval() {
        let (lo, hi) = confidence_interval(&moments_1d(0.0, 1.0), 0, 0.95).unwrap();
        assert!((lo + 1.959964).abs() < 1e-6 && (hi - 1.959964).abs() < 1e-6);
    }

    #[test]
    fn degenerate_interval() {
        assert_eq!(confidence_interval(&moments_1d(2.0, 0.0), 0, 0.9).unwrap(), (2.0, 2.0));
    }

    #[test]
    fn half_width_scales_with_sqrt_variance() {
        let (lo1, hi1) = confidence_interval(&moments_1d(1.0, 0.7), 0, 0.8).unwrap();
        let (lo2, hi2) = confidence_interval(&moments_1d(1.0, 1.4), 0, 0.8).unwrap();
        let ratio = (hi2 - lo2) / (hi1 - lo1);
        assert!((ratio - 2f64.sqrt()).abs() < 1e-12);
        assert!(lo2 < lo1);
    }

    #[test]
    fn level_and_index_errors() {
        let m = moments_1d(0.0, 1.0);
        assert!(matches!(confidence_interval(&m, 0, 1.0), Err(Error::LevelOutOfRange(_))));
        assert!(matches!(confidence_interval(&m, 0, 0.0), Err(Error::LevelOutOfRange(_))));
        assert!(matches!(confidence_interval(&m, 1, 0.5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn grouped_covariance_by_hand() {
        // 2 groups x 2 trees, one point.
        let preds = vec![vec![1.0], vec![3.0], vec![5.0], vec![7.0]];
        let raw = GroupDesign { n_z: 2, n_mc: 2, zeta1: ZetaOneEstimator::Raw };
        // group means 2, 6 -> var 8; all trees var 20/3; n=10, k=2
        let s = grouped_covariance(&preds, &raw, 10, 2);
        assert!((s[(0, 0)] - (0.4 * 8.0 + 20.0 / 3.0 / 4.0)).abs() < 1e-12);
        // within-group variance 2 in both groups -> corrected zeta1 = 8 - 1
        let corrected = GroupDesign { zeta1: ZetaOneEstimator::BiasCorrected, ..raw };
        let s = grouped_covariance(&preds, &corrected, 10, 2);
        assert!((s[(0, 0)] - (0.4 * 7.0 + 20.0 / 3.0 / 4.0)).abs() < 1e-12);
    }
}
