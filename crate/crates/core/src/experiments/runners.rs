//! Replicated batch runners and their table output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{augment_noise, Dataset, NoiseDist};
use crate::error::{Error, Result};
use crate::forest::{fit_forest, ForestParams};
use crate::inference::{fit_paired_forests, tree_swap_test, TestResult, Transform};
use crate::rng::{derive_seed, TAG_REPLICATE, TAG_TRANSFORM};
use crate::stats::{mean, mse, standard_error};

use super::generators::{gen_linear, LinearScenario};

/// One cell of a results table: a method's mean test MSE at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scenario: String,
    pub snr: f64,
    pub method: String,
    pub mean_mse: f64,
    pub se: f64,
    pub replicates: usize,
}

/// `(MSE_a - MSE_b) / MSE_a` at one SNR, with a paired standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub snr: f64,
    pub improvement: f64,
    pub se: f64,
}

impl Improvement {
    fn paired(snr: f64, a: &[f64], b: &[f64]) -> Self {
        let base = mean(a);
        let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self {
            snr,
            improvement: mean(&diffs) / base,
            se: standard_error(&diffs) / base,
        }
    }
}

fn row(scenario: &str, snr: f64, method: &str, values: &[f64]) -> SweepRow {
    SweepRow {
        scenario: scenario.to_owned(),
        snr,
        method: method.to_owned(),
        mean_mse: mean(values),
        se: standard_error(values),
        replicates: values.len(),
    }
}

fn test_mse(train: &Dataset, test: &Dataset, params: &ForestParams) -> Result<f64> {
    let forest = fit_forest(train, params)?;
    Ok(mse(&forest.predict_many(&test.rows())?, test.response()))
}

/// Per-replicate seeds: replicate `r` draws its data from
/// `derive_seed(seed, REPLICATE, r)` and its forests from the next
/// derivation, so every method in a cell sees the same data.
pub(crate) fn replicate_seeds(seed: u64, r: usize) -> (u64, u64) {
    let data = derive_seed(seed, TAG_REPLICATE, r as u64);
    (data, derive_seed(data, TAG_REPLICATE, 0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SnrSweepConfig {
    pub snrs: Vec<f64>,
    pub base: LinearScenario,
    pub replicates: usize,
    pub bagging: ForestParams,
    pub forest: ForestParams,
    pub seed: u64,
}

impl Default for SnrSweepConfig {
    fn default() -> Self {
        let base = LinearScenario { s: 20, rho: 0.7, ..Default::default() };
        let forest = ForestParams { b: 100, ..Default::default() };
        let mut bagging = forest.clone();
        bagging.tree.mtry = Some(base.p);
        Self {
            snrs: vec![0.1, 1.0, 10.0],
            base,
            replicates: 50,
            bagging,
            forest,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrSweepResult {
    pub rows: Vec<SweepRow>,
    /// Relative improvement of the random forest over bagging.
    pub improvements: Vec<Improvement>,
}

/// Bagging versus a random forest across an SNR grid on shared
/// replicate data.
pub fn run_snr_sweep(cfg: &SnrSweepConfig) -> Result<SnrSweepResult> {
    if cfg.snrs.len() < 3 {
        return Err(Error::InvalidParam("snr sweep needs at least 3 levels".into()));
    }
    if cfg.replicates < 20 {
        return Err(Error::InvalidParam("snr sweep needs at least 20 replicates".into()));
    }
    let mut rows = Vec::new();
    let mut improvements = Vec::new();
    for &snr in &cfg.snrs {
        let cells: Vec<(f64, f64)> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                let (data_seed, fit_seed) = replicate_seeds(cfg.seed, r);
                let (train, test) = gen_linear(&cfg.base.with_snr(snr).with_seed(data_seed));
                let bag = test_mse(&train, &test, &ForestParams { seed: fit_seed, ..cfg.bagging.clone() })?;
                let rf = test_mse(&train, &test, &ForestParams { seed: fit_seed, ..cfg.forest.clone() })?;
                Ok((bag, rf))
            })
            .collect::<Result<_>>()?;
        let (bag, rf): (Vec<f64>, Vec<f64>) = cells.into_iter().unzip();
        rows.push(row("snr_sweep", snr, "bagging", &bag));
        rows.push(row("snr_sweep", snr, "random_forest", &rf));
        improvements.push(Improvement::paired(snr, &bag, &rf));
    }
    Ok(SnrSweepResult { rows, improvements })
}

/// How the noise block is altered for the tree-swap test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockTransform {
    /// Compare against a forest without the noise block.
    #[default]
    Drop,
    /// Compare against a forest with the block permuted jointly.
    Permute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentedBaggingConfig {
    pub base: LinearScenario,
    pub q: usize,
    pub replicates: usize,
    /// Forest settings; `mtry` is always reset to the full feature count.
    pub bagging: ForestParams,
    pub swap: ForestParams,
    pub block_transform: BlockTransform,
    pub n_perm: usize,
    pub seed: u64,
}

impl Default for AugmentedBaggingConfig {
    fn default() -> Self {
        Self {
            base: LinearScenario { s: 20, rho: 0.7, snr: 0.1, ..Default::default() },
            q: 50,
            replicates: 50,
            bagging: ForestParams { b: 100, ..Default::default() },
            swap: ForestParams { b: 100, ..Default::default() },
            block_transform: BlockTransform::Drop,
            n_perm: 199,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedBaggingResult {
    pub rows: Vec<SweepRow>,
    /// Mean of `MSE_baseline - MSE_augmented` over replicates.
    pub mean_gain: f64,
    pub gain_se: f64,
    /// Tree-swap test of the noise block on the first replicate.
    pub test: TestResult,
}

fn full_mtry(params: &ForestParams, p: usize) -> ForestParams {
    let mut out = params.clone();
    out.tree.mtry = Some(p.max(1));
    out
}

/// Bagging on the original features versus the same features plus `q`
/// independent Gaussian noise columns.
pub fn run_augmented_bagging(cfg: &AugmentedBaggingConfig) -> Result<AugmentedBaggingResult> {
    if cfg.replicates < 2 {
        return Err(Error::InvalidParam("augmented bagging needs at least 2 replicates".into()));
    }
    let augment = |train: &Dataset, test: &Dataset, data_seed: u64| -> Result<(Dataset, Dataset)> {
        Ok((
            augment_noise(train, cfg.q, NoiseDist::StandardGaussian, derive_seed(data_seed, TAG_TRANSFORM, 0))?,
            augment_noise(test, cfg.q, NoiseDist::StandardGaussian, derive_seed(data_seed, TAG_TRANSFORM, 1))?,
        ))
    };
    let cells: Vec<(f64, f64)> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let (data_seed, fit_seed) = replicate_seeds(cfg.seed, r);
            let (train, test) = gen_linear(&cfg.base.with_seed(data_seed));
            let (atrain, atest) = augment(&train, &test, data_seed)?;
            let base = ForestParams { seed: fit_seed, ..cfg.bagging.clone() };
            let plain = test_mse(&train, &test, &full_mtry(&base, train.p()))?;
            let aug = test_mse(&atrain, &atest, &full_mtry(&base, atrain.p()))?;
            Ok((plain, aug))
        })
        .collect::<Result<_>>()?;
    let (plain, aug): (Vec<f64>, Vec<f64>) = cells.into_iter().unzip();
    let gains: Vec<f64> = plain.iter().zip(&aug).map(|(a, b)| a - b).collect();
    let snr = cfg.base.snr;
    let rows = vec![
        row("augmented_bagging", snr, "bagging", &plain),
        row("augmented_bagging", snr, "augmented_bagging", &aug),
    ];

    let (data_seed, fit_seed) = replicate_seeds(cfg.seed, 0);
    let (train, test) = gen_linear(&cfg.base.with_seed(data_seed));
    let (atrain, atest) = augment(&train, &test, data_seed)?;
    let test_result = if cfg.q == 0 {
        TestResult {
            method: "tree_swap".into(),
            statistic: 0.0,
            dof: None,
            n_perm: Some(cfg.n_perm),
            p_value: 1.0,
            projection_dim: None,
            points: None,
            diff: None,
        }
    } else {
        let block: Vec<usize> = (train.p()..atrain.p()).collect();
        let transform = match cfg.block_transform {
            BlockTransform::Drop => Transform::Drop(block),
            BlockTransform::Permute => Transform::Permute(block),
        };
        let swap = full_mtry(&ForestParams { seed: fit_seed, ..cfg.swap.clone() }, atrain.p());
        let paired = fit_paired_forests(&atrain, &swap, &transform, derive_seed(data_seed, TAG_TRANSFORM, 2))?;
        tree_swap_test(&paired, &atest, cfg.n_perm, derive_seed(data_seed, TAG_TRANSFORM, 3))?
    };
    Ok(AugmentedBaggingResult {
        rows,
        mean_gain: mean(&gains),
        gain_se: standard_error(&gains),
        test: test_result,
    })
}

/// CSV with one line per row, header taken from the field names.
pub fn write_rows_csv<T: Serialize, W: std::io::Write>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Content digest in the style of a git blob id, using SHA-256:
/// `sha256("blob <len>\0" || content)`.
pub fn content_digest(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Run record written next to a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest<C, S> {
    pub scenario: String,
    pub config: C,
    /// Digest of the results CSV bytes.
    pub digest: String,
    pub summary: S,
}

impl<C: Serialize, S: Serialize> Manifest<C, S> {
    pub fn new(scenario: &str, config: C, results_csv: &[u8], summary: S) -> Self {
        Self {
            scenario: scenario.to_owned(),
            config,
            digest: content_digest(results_csv),
            summary,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
