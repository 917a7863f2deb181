//! Variable-importance measures.
//!
//! Two families live here. Out-of-bag permutation and impurity importance
//! need only a fitted forest but are known to be biased toward correlated
//! and high-cardinality features; their reports carry a caveat. The rebuild
//! measures refit a paired forest on transformed training data and report
//! the change in held-out error.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::{Forest, ForestParams};
use crate::inference::{fit_paired_forests, PairedForests, Transform};
use crate::rng::{derive_seed, rng_from_seed, TAG_IMPORTANCE, TAG_TRANSFORM};
use crate::stats::mse;

const BIASED_CAVEAT: &str =
    "repredict-only measure; inflated for correlated and many-valued features";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMethod {
    OobPermute,
    Impurity,
    PermuteRebuild,
    DropRebuild,
    ConditionalPermuteRebuild,
}

impl ImportanceMethod {
    pub const ALL: [ImportanceMethod; 5] = [
        ImportanceMethod::OobPermute,
        ImportanceMethod::Impurity,
        ImportanceMethod::PermuteRebuild,
        ImportanceMethod::DropRebuild,
        ImportanceMethod::ConditionalPermuteRebuild,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ImportanceMethod::OobPermute => "oob_permute",
            ImportanceMethod::Impurity => "impurity",
            ImportanceMethod::PermuteRebuild => "permute_rebuild",
            ImportanceMethod::DropRebuild => "drop_rebuild",
            ImportanceMethod::ConditionalPermuteRebuild => "conditional_permute_rebuild",
        }
    }

    /// The rebuild mode behind a rebuild method.
    pub fn rebuild_mode(self) -> Option<RebuildMode> {
        match self {
            ImportanceMethod::PermuteRebuild => Some(RebuildMode::Permute),
            ImportanceMethod::DropRebuild => Some(RebuildMode::Drop),
            ImportanceMethod::ConditionalPermuteRebuild => Some(RebuildMode::Conditional),
            _ => None,
        }
    }

    pub fn caveat(self) -> Option<&'static str> {
        matches!(self, ImportanceMethod::OobPermute | ImportanceMethod::Impurity).then_some(BIASED_CAVEAT)
    }
}

impl fmt::Display for ImportanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ImportanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown importance method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RebuildMode {
    Permute,
    Drop,
    Conditional,
}

impl RebuildMode {
    pub fn transform(self, j: usize) -> Transform {
        match self {
            RebuildMode::Permute => Transform::permute(j),
            RebuildMode::Drop => Transform::drop(j),
            RebuildMode::Conditional => Transform::ConditionalPermute(j),
        }
    }

    pub fn method(self) -> ImportanceMethod {
        match self {
            RebuildMode::Permute => ImportanceMethod::PermuteRebuild,
            RebuildMode::Drop => ImportanceMethod::DropRebuild,
            RebuildMode::Conditional => ImportanceMethod::ConditionalPermuteRebuild,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub method: ImportanceMethod,
    pub features: Vec<String>,
    pub scores: Vec<f64>,
    pub caveat: Option<String>,
}

impl ImportanceReport {
    fn new(method: ImportanceMethod, features: Vec<String>, scores: Vec<f64>) -> Self {
        Self {
            method,
            features,
            scores,
            caveat: method.caveat().map(str::to_owned),
        }
    }

    /// Feature indices from most to least important; ties keep index order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]));
        idx
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Write reports as long-format CSV with columns
/// `feature,method,score,caveat`.
pub fn write_reports_csv<W: std::io::Write>(reports: &[ImportanceReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["feature", "method", "score", "caveat"])?;
    for r in reports {
        for (name, score) in r.features.iter().zip(&r.scores) {
            w.write_record([
                name.as_str(),
                r.method.as_str(),
                &score.to_string(),
                r.caveat.as_deref().unwrap_or(""),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Breiman's tree-by-tree scheme: for each tree and feature, permute the
/// feature among that tree's out-of-bag rows and record the rise in MSE.
/// Scores average over trees that have out-of-bag rows.
pub fn oob_permutation_importance(forest: &Forest, ds: &Dataset, seed: u64) -> Result<ImportanceReport> {
    if ds.n() != forest.n_train {
        return Err(Error::InvalidParam(format!(
            "forest trained on {} rows, dataset has {}",
            forest.n_train,
            ds.n()
        )));
    }
    if ds.p() != forest.n_features() {
        return Err(Error::ArityMismatch {
            expected: forest.n_features(),
            got: ds.p(),
        });
    }
    let masks = forest.in_sample_masks();
    let mut covered = vec![false; ds.n()];
    for mask in &masks {
        for (c, &inside) in covered.iter_mut().zip(mask) {
            *c |= !inside;
        }
    }
    if let Some(i) = covered.iter().position(|c| !c) {
        return Err(Error::NoOobCoverage(i));
    }
    let p = ds.p();
    let y = ds.response();
    let contributions: Vec<Option<Vec<f64>>> = forest
        .trees
        .par_iter()
        .zip(masks.par_iter())
        .enumerate()
        .map(|(b, (tree, mask))| {
            let oob: Vec<usize> = (0..ds.n()).filter(|&i| !mask[i]).collect();
            if oob.is_empty() {
                return None;
            }
            let rows: Vec<Vec<f64>> = oob.iter().map(|&i| ds.row(i)).collect();
            let truth: Vec<f64> = oob.iter().map(|&i| y[i]).collect();
            let base_pred: Vec<f64> = rows.iter().map(|x| tree.predict_unchecked(x)).collect();
            let base = mse(&base_pred, &truth);
            let used = tree.split_features();
            let tree_seed = derive_seed(seed, TAG_IMPORTANCE, b as u64);
            Some(
                (0..p)
                    .map(|j| {
                        if !used.contains(&j) {
                            return 0.0;
                        }
                        let mut values: Vec<f64> = rows.iter().map(|x| x[j]).collect();
                        values.shuffle(&mut rng_from_seed(derive_seed(tree_seed, TAG_IMPORTANCE, j as u64)));
                        let pred: Vec<f64> = rows
                            .iter()
                            .zip(&values)
                            .map(|(x, &v)| {
                                let mut xp = x.clone();
                                xp[j] = v;
                                tree.predict_unchecked(&xp)
                            })
                            .collect();
                        mse(&pred, &truth) - base
                    })
                    .collect(),
            )
        })
        .collect();
    let mut scores = vec![0.0; p];
    let mut count = 0usize;
    for c in contributions.into_iter().flatten() {
        count += 1;
        for (s, v) in scores.iter_mut().zip(c) {
            *s += v;
        }
    }
    scores.iter_mut().for_each(|s| *s /= count as f64);
    Ok(ImportanceReport::new(ImportanceMethod::OobPermute, ds.names().to_vec(), scores))
}

/// Mean over trees of the total SSE reduction credited to each feature.
pub fn impurity_importance(forest: &Forest) -> ImportanceReport {
    let p = forest.n_features();
    let mut scores = vec![0.0; p];
    for tree in &forest.trees {
        for (s, g) in scores.iter_mut().zip(tree.split_gains()) {
            *s += g;
        }
    }
    if !forest.trees.is_empty() {
        scores.iter_mut().for_each(|s| *s /= forest.trees.len() as f64);
    }
    ImportanceReport::new(ImportanceMethod::Impurity, forest.schema.names.clone(), scores)
}

/// Held-out MSE of the transformed-data forest minus that of the
/// original-data forest.
pub fn paired_mse_gap(paired: &PairedForests, eval: &Dataset) -> Result<f64> {
    if eval.n() == 0 {
        return Err(Error::EmptyEval);
    }
    let xs = eval.rows();
    let omega = paired.omega.predict_many(&xs)?;
    let pi = paired.pi.predict_many(&paired.transform.apply_points(&xs))?;
    Ok(mse(&pi, eval.response()) - mse(&omega, eval.response()))
}

/// Refit with feature `j` permuted, dropped or conditionally permuted and
/// report the change in held-out MSE.
pub fn rebuild_importance(
    ds: &Dataset,
    params: &ForestParams,
    j: usize,
    mode: RebuildMode,
    eval: &Dataset,
    seed: u64,
) -> Result<f64> {
    if eval.n() == 0 {
        return Err(Error::EmptyEval);
    }
    if eval.p() != ds.p() {
        return Err(Error::ArityMismatch {
            expected: ds.p(),
            got: eval.p(),
        });
    }
    let paired = fit_paired_forests(ds, params, &mode.transform(j), seed)?;
    paired_mse_gap(&paired, eval)
}

/// Rebuild importance for every feature; feature `j` uses a transform
/// seed derived from `(seed, j)`.
pub fn rebuild_importance_report(
    ds: &Dataset,
    params: &ForestParams,
    mode: RebuildMode,
    eval: &Dataset,
    seed: u64,
) -> Result<ImportanceReport> {
    let scores = (0..ds.p())
        .map(|j| rebuild_importance(ds, params, j, mode, eval, derive_seed(seed, TAG_TRANSFORM, j as u64)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ImportanceReport::new(mode.method(), ds.names().to_vec(), scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{gen_linear, LinearScenario};
    use crate::forest::fit_forest;
    use crate::tree::TreeParams;

    fn small() -> (Dataset, Dataset) {
        let sc = LinearScenario { n: 120, n_test: 60, p: 3, s: 1, rho: 0.0, snr: 4.0, seed: 3 };
        gen_linear(&sc)
    }

    #[test]
    fn method_tags_round_trip() {
        for m in ImportanceMethod::ALL {
            assert_eq!(m.as_str().parse::<ImportanceMethod>().unwrap(), m);
            assert_eq!(m.caveat().is_some(), matches!(m, ImportanceMethod::OobPermute | ImportanceMethod::Impurity));
        }
        assert!("gini".parse::<ImportanceMethod>().is_err());
    }

    #[test]
    fn constant_feature_scores_zero() {
        let (train, _) = small();
        let ds = train.with_column(2, vec![1.0; train.n()]).unwrap();
        let params = ForestParams { b: 30, seed: 1, ..Default::default() };
        let forest = fit_forest(&ds, &params).unwrap();
        let oob = oob_permutation_importance(&forest, &ds, 4).unwrap();
        assert_eq!(oob.scores[2], 0.0);
        assert!(oob.scores[0] > 0.0);
        let imp = impurity_importance(&forest);
        assert_eq!(imp.scores[2], 0.0);
        assert!(imp.scores.iter().all(|s| *s >= 0.0));
        assert!(imp.caveat.is_some());
    }

    #[test]
    fn single_leaf_forest_has_zero_impurity() {
        let (train, _) = small();
        let params = ForestParams {
            b: 10,
            tree: TreeParams { min_leaf: train.n(), ..Default::default() },
            ..Default::default()
        };
        let forest = fit_forest(&train, &params).unwrap();
        assert!(impurity_importance(&forest).scores.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn impurity_sums_to_mean_total_gain() {
        let (train, _) = small();
        let forest = fit_forest(&train, &ForestParams { b: 20, ..Default::default() }).unwrap();
        let total: f64 = forest.trees.iter().map(|t| t.split_gains().iter().sum::<f64>()).sum::<f64>() / 20.0;
        let sum: f64 = impurity_importance(&forest).scores.iter().sum();
        assert!((sum - total).abs() <= 1e-9 * total.max(1.0));
    }

    #[test]
    fn rebuild_on_constant_column_is_zero() {
        let (train, test) = small();
        let ds = train.with_column(1, vec![0.5; train.n()]).unwrap();
        let ev = test.with_column(1, vec![0.5; test.n()]).unwrap();
        let params = ForestParams { b: 20, ..Default::default() };
        let s = rebuild_importance(&ds, &params, 1, RebuildMode::Permute, &ev, 2).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn rebuild_detects_signal_and_requires_eval() {
        let (train, test) = small();
        let params = ForestParams { b: 40, ..Default::default() };
        let r = rebuild_importance_report(&train, &params, RebuildMode::Drop, &test, 1).unwrap();
        assert_eq!(r.method, ImportanceMethod::DropRebuild);
        assert!(r.caveat.is_none());
        assert_eq!(r.ranking()[0], 0);
        let empty = test.select_rows(&[]);
        assert!(matches!(
            rebuild_importance(&train, &params, 0, RebuildMode::Drop, &empty, 1),
            Err(Error::EmptyEval)
        ));
    }

    #[test]
    fn bootstrap_oob_and_csv() {
        let (train, _) = small();
        let params = ForestParams { b: 40, scheme: crate::forest::Scheme::Bootstrap, ..Default::default() };
        let forest = fit_forest(&train, &params).unwrap();
        let r = oob_permutation_importance(&forest, &train, 0).unwrap();
        let mut buf = Vec::new();
        write_reports_csv(&[r.clone(), impurity_importance(&forest)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 3);
        assert!(text.starts_with("feature,method,score,caveat\nx1,oob_permute,"));
        assert_eq!(oob_permutation_importance(&forest, &train, 0).unwrap(), r);
    }

    #[test]
    fn no_oob_coverage() {
        let (train, _) = small();
        let params = ForestParams { b: 3, k: Some(train.n()), ..Default::default() };
        let forest = fit_forest(&train, &params).unwrap();
        assert!(matches!(oob_permutation_importance(&forest, &train, 0), Err(Error::NoOobCoverage(_))));
    }
}
