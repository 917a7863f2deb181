//! Replications of two known importance biases: correlated proxies under
//! permute-and-repredict, and split-count bias under impurity importance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{fit_forest, ForestParams};
use crate::importance::{impurity_importance, oob_permutation_importance, rebuild_importance, RebuildMode};
use crate::inference::{fit_paired_forests, tree_swap_test, Transform};
use crate::rng::{derive_seed, TAG_EVAL, TAG_TRANSFORM};
use crate::stats::{mean, standard_error};
use crate::tree::TreeParams;

use super::generators::{gen_cardinality, CorrelatedPair, CORRELATED_PAIR_NOISE_SD};
use super::runners::replicate_seeds;

/// One score from one run, in long format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub scenario: String,
    pub run: usize,
    pub feature: String,
    pub method: String,
    pub value: f64,
}

fn run_row(scenario: &str, run: usize, feature: &str, method: &str, value: f64) -> RunRow {
    RunRow {
        scenario: scenario.to_owned(),
        run,
        feature: feature.to_owned(),
        method: method.to_owned(),
        value,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorrelatedPairConfig {
    pub n: usize,
    pub rho: f64,
    pub noise_sd: f64,
    pub runs: usize,
    /// Used for both the OOB forest and the drop-rebuild pair.
    pub forest: ForestParams,
    pub seed: u64,
}

impl Default for CorrelatedPairConfig {
    fn default() -> Self {
        Self {
            n: 500,
            rho: 0.9,
            noise_sd: CORRELATED_PAIR_NOISE_SD,
            runs: 100,
            forest: ForestParams {
                b: 200,
                tree: TreeParams { mtry: Some(3), min_leaf: 50, ..Default::default() },
                ..Default::default()
            },
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedPairSummary {
    /// Share of runs where OOB permutation importance ranks `x2` above `x3`.
    pub oob_x2_over_x3: f64,
    pub drop_x2_mean: f64,
    pub drop_x2_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedPairResult {
    pub rows: Vec<RunRow>,
    pub summary: CorrelatedPairSummary,
}

/// OOB permutation importance of all three features and drop-rebuild
/// importance of the proxy `x2`, per run.
pub fn run_correlated_pair(cfg: &CorrelatedPairConfig) -> Result<CorrelatedPairResult> {
    if cfg.runs < 2 {
        return Err(Error::InvalidParam("correlated pair needs at least 2 runs".into()));
    }
    let per_run: Vec<(Vec<f64>, f64)> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| {
            let (data_seed, fit_seed) = replicate_seeds(cfg.seed, r);
            let gen = |seed| CorrelatedPair { n: cfg.n, rho: cfg.rho, noise_sd: cfg.noise_sd, seed }.generate();
            let train = gen(data_seed);
            let eval = gen(derive_seed(data_seed, TAG_EVAL, 0));
            let params = ForestParams { seed: fit_seed, ..cfg.forest.clone() };
            let forest = fit_forest(&train, &params)?;
            let oob = oob_permutation_importance(&forest, &train, derive_seed(fit_seed, TAG_TRANSFORM, 0))?;
            let drop = rebuild_importance(&train, &params, 1, RebuildMode::Drop, &eval, derive_seed(fit_seed, TAG_TRANSFORM, 1))?;
            Ok((oob.scores, drop))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (r, (oob, drop)) in per_run.iter().enumerate() {
        for (j, v) in oob.iter().enumerate() {
            rows.push(run_row("correlated_pair", r, &format!("x{}", j + 1), "oob_permute", *v));
        }
        rows.push(run_row("correlated_pair", r, "x2", "drop_rebuild", *drop));
    }
    let wins = per_run.iter().filter(|(oob, _)| oob[1] > oob[2]).count();
    let drops: Vec<f64> = per_run.iter().map(|(_, d)| *d).collect();
    Ok(CorrelatedPairResult {
        rows,
        summary: CorrelatedPairSummary {
            oob_x2_over_x3: wins as f64 / cfg.runs as f64,
            drop_x2_mean: mean(&drops),
            drop_x2_se: standard_error(&drops),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CardinalityConfig {
    pub n: usize,
    pub n_eval: usize,
    pub distinct_counts: Vec<usize>,
    pub runs: usize,
    /// Forest behind the impurity scores.
    pub forest: ForestParams,
    /// Paired forests behind the tree-swap tests.
    pub swap: ForestParams,
    pub n_perm: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for CardinalityConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            n_eval: 200,
            distinct_counts: vec![2, 1000],
            runs: 100,
            forest: ForestParams::default(),
            // min_leaf 5 would let a 10-row subsample split a binary
            // feature only at an exact 5/5 draw, which makes the test
            // conservative for low-cardinality features.
            swap: ForestParams {
                b: 25,
                k: Some(10),
                tree: TreeParams { min_leaf: 2, ..Default::default() },
                ..Default::default()
            },
            n_perm: 199,
            level: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardinalitySummary {
    /// Share of runs where the last feature out-scores the first under
    /// impurity importance.
    pub high_over_low: f64,
    /// Per feature, share of runs whose tree-swap p-value is below `level`.
    pub swap_rejection: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardinalityResult {
    pub rows: Vec<RunRow>,
    pub summary: CardinalitySummary,
}

/// Impurity importance and per-feature tree-swap p-values on pure-noise
/// data whose features differ only in their number of distinct values.
pub fn run_cardinality(cfg: &CardinalityConfig) -> Result<CardinalityResult> {
    if cfg.distinct_counts.len() < 2 {
        return Err(Error::InvalidParam("cardinality study needs at least 2 features".into()));
    }
    if cfg.runs < 2 {
        return Err(Error::InvalidParam("cardinality study needs at least 2 runs".into()));
    }
    let p = cfg.distinct_counts.len();
    let per_run: Vec<(Vec<String>, Vec<f64>, Vec<f64>)> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| {
            let (data_seed, fit_seed) = replicate_seeds(cfg.seed, r);
            let train = gen_cardinality(cfg.n, &cfg.distinct_counts, data_seed);
            let eval = gen_cardinality(cfg.n_eval, &cfg.distinct_counts, derive_seed(data_seed, TAG_EVAL, 0));
            let forest = fit_forest(&train, &ForestParams { seed: fit_seed, ..cfg.forest.clone() })?;
            let impurity = impurity_importance(&forest).scores;
            let swap = ForestParams { seed: fit_seed, ..cfg.swap.clone() };
            let p_values = (0..p)
                .map(|j| {
                    let paired = fit_paired_forests(&train, &swap, &Transform::permute(j), derive_seed(fit_seed, TAG_TRANSFORM, 2 * j as u64))?;
                    Ok(tree_swap_test(&paired, &eval, cfg.n_perm, derive_seed(fit_seed, TAG_TRANSFORM, 2 * j as u64 + 1))?.p_value)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((train.names().to_vec(), impurity, p_values))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (r, (names, impurity, p_values)) in per_run.iter().enumerate() {
        for j in 0..p {
            rows.push(run_row("cardinality", r, &names[j], "impurity", impurity[j]));
            rows.push(run_row("cardinality", r, &names[j], "tree_swap_p", p_values[j]));
        }
    }
    let runs = cfg.runs as f64;
    let wins = per_run.iter().filter(|(_, s, _)| s[p - 1] > s[0]).count();
    let swap_rejection = (0..p)
        .map(|j| per_run.iter().filter(|(_, _, pv)| pv[j] < cfg.level).count() as f64 / runs)
        .collect();
    Ok(CardinalityResult {
        rows,
        summary: CardinalitySummary {
            high_over_low: wins as f64 / runs,
            swap_rejection,
        },
    })
}
