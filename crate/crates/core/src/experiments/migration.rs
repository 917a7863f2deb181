//! Synthetic migration-timing study.
//!
//! Presence/absence records over day of season, region and year, with a
//! temperature covariate that tracks the season. Temperature is replaced by
//! its anomaly from the same region and day averaged over years, which
//! removes the seasonal collinearity. The anomaly is then tested per region
//! with a paired forest per region and a 25-point chi-squared test.

use rand::Rng;
use rayon::prelude::*;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{drop_coordinates, drop_feature, Dataset, FeatureKind};
use crate::error::{Error, Result};
use crate::forest::ForestParams;
use crate::inference::{chi2_test, fit_paired, GroupDesign, Regularization, TestResult, Transform};
use crate::rng::{derive_seed, rng_from_seed, TAG_REPLICATE, TAG_TRANSFORM};
use crate::stats::{normal_quantile, sample_variance};
use crate::tree::TreeParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MigrationConfig {
    pub regions: usize,
    pub years: usize,
    pub days: usize,
    /// Logit-scale effect of a one-sd temperature anomaly, per region.
    pub effects: Vec<f64>,
    /// Each region is tested on a `grid_side x grid_side` grid.
    pub grid_side: usize,
    pub forest: ForestParams,
    pub design: GroupDesign,
    pub seed: u64,
}

impl Default for MigrationConfig {
    fn default() -> Self {
        Self {
            regions: 4,
            years: 6,
            days: 60,
            effects: vec![0.0, 0.0, 1.5, 1.5],
            grid_side: 5,
            forest: ForestParams {
                k: Some(15),
                tree: TreeParams { min_leaf: 5, ..Default::default() },
                ..Default::default()
            },
            design: GroupDesign::default(),
            seed: 0,
        }
    }
}

impl MigrationConfig {
    pub fn null(&self) -> Self {
        Self {
            effects: vec![0.0; self.regions],
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.regions == 0 || self.years < 2 || self.days < 2 {
            return Err(Error::InvalidParam(
                "migration study needs a region, two years and two days".into(),
            ));
        }
        if self.effects.len() != self.regions {
            return Err(Error::InvalidParam(format!(
                "{} effects for {} regions",
                self.effects.len(),
                self.regions
            )));
        }
        if self.grid_side == 0 {
            return Err(Error::InvalidParam("grid side must be positive".into()));
        }
        Ok(())
    }
}

/// Raw records plus the orthogonalized covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct MigrationData {
    /// Features `day`, `region`, `temperature`.
    pub raw: Dataset,
    /// Features `day`, `region`, `anomaly`.
    pub analysis: Dataset,
}

pub const REGION_COLUMN: usize = 1;
pub const ANOMALY_COLUMN: usize = 2;

/// Subtract the mean of `values` within each group.
pub fn center_within_groups(values: &[f64], groups: &[usize]) -> Vec<f64> {
    let g = groups.iter().copied().max().map_or(0, |m| m + 1);
    let mut sum = vec![0.0; g];
    let mut count = vec![0usize; g];
    for (&v, &k) in values.iter().zip(groups) {
        sum[k] += v;
        count[k] += 1;
    }
    values
        .iter()
        .zip(groups)
        .map(|(&v, &k)| v - sum[k] / count[k] as f64)
        .collect()
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub fn gen_migration(cfg: &MigrationConfig) -> Result<MigrationData> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let peaks: Vec<f64> = (0..cfg.regions)
        .map(|r| cfg.days as f64 * (0.35 + 0.3 * r as f64 / cfg.regions.max(2) as f64))
        .collect();
    let width = cfg.days as f64 / 6.0;
    let (mut day, mut region, mut temp, mut cell) = (vec![], vec![], vec![], vec![]);
    for r in 0..cfg.regions {
        for _y in 0..cfg.years {
            let shift = 1.5 * Distribution::<f64>::sample(&StandardNormal, &mut rng);
            let mut ar = 0.0;
            for d in 0..cfg.days {
                let e: f64 = StandardNormal.sample(&mut rng);
                ar = 0.7 * ar + (1.0f64 - 0.49).sqrt() * 2.0 * e;
                day.push(d as f64);
                region.push(r as f64);
                temp.push(5.0 + 2.0 * r as f64 + 0.3 * d as f64 + shift + ar);
                cell.push(r * cfg.days + d);
            }
        }
    }
    let anomaly = center_within_groups(&temp, &cell);
    let sd = sample_variance(&anomaly).sqrt().max(f64::MIN_POSITIVE);
    let y: Vec<f64> = (0..day.len())
        .map(|i| {
            let r = region[i] as usize;
            let season = 3.0 * (-((day[i] - peaks[r]) / width).powi(2)).exp();
            let prob = logistic(-1.5 + season + cfg.effects[r] * anomaly[i] / sd);
            if rng.random_bool(prob) { 1.0 } else { 0.0 }
        })
        .collect();
    let kinds = vec![
        FeatureKind::Numeric,
        FeatureKind::Categorical {
            levels: (0..cfg.regions).map(|r| format!("region_{r}")).collect(),
        },
        FeatureKind::Numeric,
    ];
    let raw = Dataset::new(
        vec!["day".into(), "region".into(), "temperature".into()],
        kinds.clone(),
        vec![day.clone(), region.clone(), temp],
        y.clone(),
    )?;
    let analysis = Dataset::new(
        vec!["day".into(), "region".into(), "anomaly".into()],
        kinds,
        vec![day, region, anomaly],
        y,
    )?;
    Ok(MigrationData { raw, analysis })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionTest {
    pub region: usize,
    pub effect: f64,
    pub result: TestResult,
}

/// Query grid for one region: `side` evenly spaced days crossed with
/// `side` anomaly levels at evenly spaced normal quantiles of its sd.
pub fn region_grid(cfg: &MigrationConfig, region: usize, anomaly_sd: f64, side: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(side * side);
    for a in 0..side {
        let d = (a as f64 + 0.5) * cfg.days as f64 / side as f64;
        for b in 0..side {
            let z = normal_quantile((b as f64 + 0.5) / side as f64);
            out.push(vec![d, region as f64, z * anomaly_sd]);
        }
    }
    out
}

/// Per-region tests of the anomaly. Each region gets its own paired forest
/// on `(day, anomaly)`, so effects elsewhere cannot leak into its null, and
/// `D` is tested on a `side x side` grid of days and anomaly levels.
pub fn run_migration_demo(cfg: &MigrationConfig) -> Result<Vec<RegionTest>> {
    let data = gen_migration(cfg)?;
    let ds = &data.analysis;
    let sd = sample_variance(ds.column(ANOMALY_COLUMN)).sqrt();
    let region_col = ds.column(REGION_COLUMN);
    (0..cfg.regions)
        .map(|r| {
            let rows: Vec<usize> = (0..ds.n()).filter(|&i| region_col[i] as usize == r).collect();
            let sub = drop_feature(&ds.select_rows(&rows), REGION_COLUMN)?;
            let points: Vec<Vec<f64>> = region_grid(cfg, r, sd, cfg.grid_side)
                .iter()
                .map(|x| drop_coordinates(x, &[REGION_COLUMN]))
                .collect();
            let forest = ForestParams {
                seed: derive_seed(cfg.seed, TAG_TRANSFORM, 2 * r as u64 + 1),
                ..cfg.forest.clone()
            };
            let (_, mom) = fit_paired(
                &sub,
                &forest,
                &Transform::permute(ANOMALY_COLUMN - 1),
                derive_seed(cfg.seed, TAG_TRANSFORM, 2 * r as u64),
                &points,
                cfg.design,
            )?;
            let mut result = chi2_test(&mom.mean, &mom.cov, Regularization::default())?.with_method("migration_chi2");
            result.points = Some(region_grid(cfg, r, sd, cfg.grid_side));
            Ok(RegionTest {
                region: r,
                effect: cfg.effects[r],
                result,
            })
        })
        .collect()
}

/// Rejection rate of one region's test over replicated datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRate {
    pub region: usize,
    pub effect: f64,
    pub rejection: f64,
    pub replicates: usize,
}

/// Repeat the demo on `replicates` independent datasets (replicate `r`
/// uses seed `derive_seed(cfg.seed, REPLICATE, r)`) and report per-region
/// rejection rates at `level`.
pub fn run_migration_study(cfg: &MigrationConfig, replicates: usize, level: f64) -> Result<Vec<RegionRate>> {
    if replicates == 0 {
        return Err(Error::InvalidParam("migration study needs at least 1 replicate".into()));
    }
    let runs: Vec<Vec<RegionTest>> = (0..replicates)
        .into_par_iter()
        .map(|r| run_migration_demo(&cfg.with_seed(derive_seed(cfg.seed, TAG_REPLICATE, r as u64))))
        .collect::<Result<_>>()?;
    Ok((0..cfg.regions)
        .map(|region| RegionRate {
            region,
            effect: cfg.effects[region],
            rejection: runs.iter().filter(|run| run[region].result.rejects(level)).count() as f64 / replicates as f64,
            replicates,
        })
        .collect())
}
