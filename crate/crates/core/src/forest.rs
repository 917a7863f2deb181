//! Tree ensembles under bootstrap or subsampling, with prediction, OOB
//! error and JSON persistence.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{draw_subsample_with, Dataset, FeatureSchema};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, TAG_ANCHOR, TAG_TREE};
use crate::stats::mse;
use crate::tree::{fit_tree, Tree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Bootstrap,
    Subsample,
    SubsampleWithReplacement,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Bootstrap => "bootstrap",
            Scheme::Subsample => "subsample",
            Scheme::SubsampleWithReplacement => "subsample_with_replacement",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bootstrap" => Ok(Scheme::Bootstrap),
            "subsample" => Ok(Scheme::Subsample),
            "subsample_with_replacement" => Ok(Scheme::SubsampleWithReplacement),
            other => Err(Error::InvalidParam(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub b: usize,
    /// Subsample size; `None` means `ceil(n / 2)`. Ignored for bootstrap.
    pub k: Option<usize>,
    pub scheme: Scheme,
    pub tree: TreeParams,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            b: 500,
            k: None,
            scheme: Scheme::Subsample,
            tree: TreeParams::default(),
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn resolved_k(&self, n: usize) -> Result<usize> {
        let k = match self.scheme {
            Scheme::Bootstrap => n,
            _ => self.k.unwrap_or_else(|| n.div_ceil(2)),
        };
        if k == 0 {
            return Err(Error::InvalidParam("subsample size must be >= 1".into()));
        }
        if self.scheme == Scheme::Subsample && k > n {
            return Err(Error::KTooLarge { k, n });
        }
        Ok(k)
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        if self.b == 0 {
            return Err(Error::InvalidParam("tree count must be >= 1".into()));
        }
        if ds.n() == 0 {
            return Err(Error::EmptyRows);
        }
        self.resolved_k(ds.n())?;
        self.tree.validate(ds.p())
    }

    fn with_replacement(&self) -> bool {
        self.scheme != Scheme::Subsample
    }
}

/// Anchored group layout: tree `b` belongs to group `b / n_mc`, whose
/// subsamples all contain row `anchors[b / n_mc]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grouping {
    pub n_z: usize,
    pub n_mc: usize,
    pub anchors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub params: ForestParams,
    pub schema: FeatureSchema,
    pub n_train: usize,
    pub response_mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Grouping>,
    pub trees: Vec<Tree>,
}

/// Rows and fitting seed for one tree.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TreePlan {
    pub rows: Vec<usize>,
    pub seed: u64,
}

pub(crate) fn plan_trees(n: usize, params: &ForestParams) -> Result<Vec<TreePlan>> {
    let k = params.resolved_k(n)?;
    (0..params.b)
        .map(|b| {
            let seed = derive_seed(params.seed, TAG_TREE, b as u64);
            let mut rng = rng_from_seed(seed);
            let rows = draw_subsample_with(n, k, params.with_replacement(), None, &mut rng)?;
            Ok(TreePlan {
                rows,
                seed: derive_seed(seed, TAG_TREE, u64::MAX),
            })
        })
        .collect()
}

pub(crate) fn plan_grouped(
    n: usize,
    params: &ForestParams,
    n_z: usize,
    n_mc: usize,
) -> Result<(Vec<TreePlan>, Grouping)> {
    let k = params.resolved_k(n)?;
    let mut anchor_rng = rng_from_seed(derive_seed(params.seed, TAG_ANCHOR, 0));
    let anchors: Vec<usize> = (0..n_z)
        .map(|_| rand::Rng::random_range(&mut anchor_rng, 0..n))
        .collect();
    let plans = (0..n_z * n_mc)
        .map(|b| {
            let seed = derive_seed(params.seed, TAG_TREE, b as u64);
            let mut rng = rng_from_seed(seed);
            let rows =
                draw_subsample_with(n, k, params.with_replacement(), Some(anchors[b / n_mc]), &mut rng)?;
            Ok(TreePlan {
                rows,
                seed: derive_seed(seed, TAG_TREE, u64::MAX),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((plans, Grouping { n_z, n_mc, anchors }))
}

/// Fit one tree per plan, in parallel, collected in plan order.
pub(crate) fn fit_planned(ds: &Dataset, tree: &TreeParams, plans: &[TreePlan]) -> Result<Vec<Tree>> {
    let global_mean = ds.response_mean();
    plans
        .par_iter()
        .map(|plan| {
            if ds.p() == 0 {
                return Ok(Tree::constant(global_mean, 0, plan.rows.clone()));
            }
            let params = TreeParams {
                seed: plan.seed,
                ..tree.clone()
            };
            fit_tree(ds, &plan.rows, &params)
        })
        .collect()
}

pub(crate) fn assemble(
    ds: &Dataset,
    params: &ForestParams,
    trees: Vec<Tree>,
    groups: Option<Grouping>,
) -> Forest {
    Forest {
        params: params.clone(),
        schema: ds.schema(),
        n_train: ds.n(),
        response_mean: ds.response_mean(),
        groups,
        trees,
    }
}

/// Fit `n_z * n_mc` trees (overriding `params.b`) in anchored groups: the
/// trees of group `z` all contain anchor row `z`. Such a forest supports
/// variance estimation after it is saved and reloaded.
pub fn fit_grouped_forest(ds: &Dataset, params: &ForestParams, n_z: usize, n_mc: usize) -> Result<Forest> {
    let params = ForestParams {
        b: n_z * n_mc,
        ..params.clone()
    };
    params.validate(ds)?;
    let (plans, grouping) = plan_grouped(ds.n(), &params, n_z, n_mc)?;
    let trees = fit_planned(ds, &params.tree, &plans)?;
    Ok(assemble(ds, &params, trees, Some(grouping)))
}

/// Fit `params.b` trees, each on an independent draw of the scheme. A
/// dataset with no features yields trees predicting the global mean.
pub fn fit_forest(ds: &Dataset, params: &ForestParams) -> Result<Forest> {
    params.validate(ds)?;
    let plans = plan_trees(ds.n(), params)?;
    let trees = fit_planned(ds, &params.tree, &plans)?;
    Ok(assemble(ds, params, trees, None))
}

impl Forest {
    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    fn check_arity(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::ArityMismatch {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.check_arity(x)?;
        Ok(self.trees.iter().map(|t| t.predict_unchecked(x)).sum::<f64>() / self.trees.len() as f64)
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    /// `out[b][i]` = prediction of tree `b` at point `i`.
    pub fn tree_predictions(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        for x in xs {
            self.check_arity(x)?;
        }
        Ok(self
            .trees
            .par_iter()
            .map(|t| xs.iter().map(|x| t.predict_unchecked(x)).collect())
            .collect())
    }

    /// Per-tree in-sample membership over `0..n_train`.
    pub(crate) fn in_sample_masks(&self) -> Vec<Vec<bool>> {
        self.trees
            .iter()
            .map(|t| {
                let mut mask = vec![false; self.n_train];
                for &i in &t.in_sample {
                    mask[i] = true;
                }
                mask
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn predict(forest: &Forest, x: &[f64]) -> Result<f64> {
    forest.predict(x)
}

/// Out-of-bag predictions: each row averaged over the trees that did not
/// see it.
pub fn oob_predictions(forest: &Forest, ds: &Dataset) -> Result<Vec<f64>> {
    if ds.n() != forest.n_train {
        return Err(Error::InvalidParam(format!(
            "forest trained on {} rows, dataset has {}",
            forest.n_train,
            ds.n()
        )));
    }
    let masks = forest.in_sample_masks();
    (0..ds.n())
        .map(|i| {
            let x = ds.row(i);
            let mut sum = 0.0;
            let mut count = 0usize;
            for (tree, mask) in forest.trees.iter().zip(&masks) {
                if !mask[i] {
                    sum += tree.predict_unchecked(&x);
                    count += 1;
                }
            }
            if count == 0 {
                Err(Error::NoOobCoverage(i))
            } else {
                Ok(sum / count as f64)
            }
        })
        .collect()
}

pub fn oob_error(forest: &Forest, ds: &Dataset) -> Result<f64> {
    let pred = oob_predictions(forest, ds)?;
    Ok(mse(&pred, ds.response()))
}
