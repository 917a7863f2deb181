use nalgebra::DMatrix;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::ForestParams;
use crate::inference::{chi2_test, estimate_moments, GroupDesign, Moments, Regularization, TestResult};
use crate::rng::rng_from_seed;

/// Values of one feature crossed with complement points whose remaining
/// coordinates are held fixed. Point `(i, c)` sits at index `i * C + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectGrid {
    pub levels: Vec<f64>,
    pub complements: Vec<Vec<f64>>,
}

/// Two features crossed with complements; point `(i, j, c)` sits at index
/// `(i * L2 + j) * C + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionGrid {
    pub levels1: Vec<f64>,
    pub levels2: Vec<f64>,
    pub complements: Vec<Vec<f64>>,
}

fn quantile_levels(ds: &Dataset, j: usize, count: usize) -> Vec<f64> {
    let mut v = ds.column(j).to_vec();
    v.sort_by(f64::total_cmp);
    let mut levels: Vec<f64> = (1..=count)
        .map(|i| {
            let q = i as f64 / (count + 1) as f64;
            v[((q * (v.len() - 1) as f64).round() as usize).min(v.len() - 1)]
        })
        .collect();
    levels.dedup();
    levels
}

fn sample_rows(ds: &Dataset, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    sample(&mut rng, ds.n(), count.min(ds.n()))
        .into_iter()
        .map(|i| ds.row(i))
        .collect()
}

impl EffectGrid {
    /// Levels at evenly spaced quantiles of column `j`; complements are
    /// randomly chosen training rows.
    pub fn from_data(ds: &Dataset, j: usize, levels: usize, complements: usize, seed: u64) -> Result<Self> {
        if j >= ds.p() {
            return Err(Error::IndexOutOfRange { index: j, len: ds.p() });
        }
        Ok(Self {
            levels: quantile_levels(ds, j, levels),
            complements: sample_rows(ds, complements, seed),
        })
    }

    pub fn points(&self, j: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.levels.len() * self.complements.len());
        for &level in &self.levels {
            for c in &self.complements {
                let mut x = c.clone();
                x[j] = level;
                out.push(x);
            }
        }
        out
    }

    /// Rows `e_(i,c) - e_(i',c)` for every level pair `i < i'`.
    pub fn contrasts(&self) -> Vec<Vec<(usize, f64)>> {
        let (l, c) = (self.levels.len(), self.complements.len());
        let mut rows = Vec::new();
        for i in 0..l {
            for i2 in i + 1..l {
                for k in 0..c {
                    rows.push(vec![(i * c + k, 1.0), (i2 * c + k, -1.0)]);
                }
            }
        }
        rows
    }
}

impl InteractionGrid {
    pub fn from_data(
        ds: &Dataset,
        j1: usize,
        j2: usize,
        levels: usize,
        complements: usize,
        seed: u64,
    ) -> Result<Self> {
        for j in [j1, j2] {
            if j >= ds.p() {
                return Err(Error::IndexOutOfRange { index: j, len: ds.p() });
            }
        }
        Ok(Self {
            levels1: quantile_levels(ds, j1, levels),
            levels2: quantile_levels(ds, j2, levels),
            complements: sample_rows(ds, complements, seed),
        })
    }

    pub fn points(&self, j1: usize, j2: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for &a in &self.levels1 {
            for &b in &self.levels2 {
                for c in &self.complements {
                    let mut x = c.clone();
                    x[j1] = a;
                    x[j2] = b;
                    out.push(x);
                }
            }
        }
        out
    }

    /// Second differences `m(i,j) - m(i',j) - m(i,j') + m(i',j')` for every
    /// `i < i'`, `j < j'` and complement.
    pub fn contrasts(&self) -> Vec<Vec<(usize, f64)>> {
        let (l1, l2, c) = (self.levels1.len(), self.levels2.len(), self.complements.len());
        let at = |i: usize, j: usize, k: usize| (i * l2 + j) * c + k;
        let mut rows = Vec::new();
        for i in 0..l1 {
            for i2 in i + 1..l1 {
                for j in 0..l2 {
                    for j2 in j + 1..l2 {
                        for k in 0..c {
                            rows.push(vec![
                                (at(i, j, k), 1.0),
                                (at(i2, j, k), -1.0),
                                (at(i, j2, k), -1.0),
                                (at(i2, j2, k), 1.0),
                            ]);
                        }
                    }
                }
            }
        }
        rows
    }
}

/// Apply sparse contrast rows `C` to `(m, Sigma)`, giving `(Cm, C Sigma C')`.
pub(crate) fn contrast_moments(rows: &[Vec<(usize, f64)>], mean: &[f64], cov: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let r = rows.len();
    let cm: Vec<f64> = rows
        .iter()
        .map(|row| row.iter().map(|&(i, w)| w * mean[i]).sum())
        .collect();
    let mut cs = DMatrix::zeros(r, r);
    for a in 0..r {
        for b in a..r {
            let mut v = 0.0;
            for &(i, wi) in &rows[a] {
                for &(j, wj) in &rows[b] {
                    v += wi * wj * cov[(i, j)];
                }
            }
            cs[(a, b)] = v;
            cs[(b, a)] = v;
        }
    }
    (cm, cs)
}

pub(crate) fn contrast_test(
    rows: &[Vec<(usize, f64)>],
    mom: &Moments,
    method: &str,
) -> Result<TestResult> {
    let (cm, cs) = contrast_moments(rows, &mom.mean, &mom.cov);
    let mut t = chi2_test(&cm, &cs, Regularization::default())?.with_method(method);
    t.points = Some(mom.points.clone());
    Ok(t)
}

fn check_complements(complements: &[Vec<f64>], p: usize) -> Result<()> {
    if complements.is_empty() {
        return Err(Error::GridTooSmall("need at least one complement point".into()));
    }
    for c in complements {
        if c.len() != p {
            return Err(Error::ArityMismatch { expected: p, got: c.len() });
        }
    }
    Ok(())
}

/// Test that the forest's mean surface does not vary with feature `j`
/// across the grid.
pub fn test_effect(
    ds: &Dataset,
    params: &ForestParams,
    j: usize,
    grid: &EffectGrid,
    design: GroupDesign,
) -> Result<TestResult> {
    if j >= ds.p() {
        return Err(Error::IndexOutOfRange { index: j, len: ds.p() });
    }
    if grid.levels.len() < 2 {
        return Err(Error::GridTooSmall("need at least two levels".into()));
    }
    check_complements(&grid.complements, ds.p())?;
    let (_, mom) = estimate_moments(ds, params, &grid.points(j), design)?;
    contrast_test(&grid.contrasts(), &mom, "effect_grid")
}

/// Test that features `j1` and `j2` enter the mean surface additively.
pub fn test_interaction(
    ds: &Dataset,
    params: &ForestParams,
    j1: usize,
    j2: usize,
    grid: &InteractionGrid,
    design: GroupDesign,
) -> Result<TestResult> {
    for j in [j1, j2] {
        if j >= ds.p() {
            return Err(Error::IndexOutOfRange { index: j, len: ds.p() });
        }
    }
    if j1 == j2 {
        return Err(Error::InvalidParam("interaction needs two distinct features".into()));
    }
    if grid.levels1.len() < 2 || grid.levels2.len() < 2 {
        return Err(Error::GridTooSmall("need at least two levels per feature".into()));
    }
    check_complements(&grid.complements, ds.p())?;
    let (_, mom) = estimate_moments(ds, params, &grid.points(j1, j2), design)?;
    contrast_test(&grid.contrasts(), &mom, "interaction_grid")
}
