use serde::{Deserialize, Serialize};

use crate::data::{
    conditional_permute_feature, default_strata, drop_coordinates, drop_features, permute_features,
    Dataset,
};
use crate::error::{Error, Result};
use crate::forest::{assemble, fit_planned, plan_grouped, plan_trees, Forest, ForestParams, TreePlan};
use crate::inference::moments::{grouped_covariance, GroupDesign, Moments, MomentsMeta, ZetaOneEstimator};
use crate::rng::{derive_seed, TAG_TRANSFORM};

/// Alteration of the training data for the second forest of a pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// One shared row permutation applied to all listed columns.
    Permute(Vec<usize>),
    /// Remove the listed columns.
    Drop(Vec<usize>),
    /// Permute within k-means strata of the remaining features.
    ConditionalPermute(usize),
}

impl Transform {
    pub fn permute(j: usize) -> Self {
        Transform::Permute(vec![j])
    }

    pub fn drop(j: usize) -> Self {
        Transform::Drop(vec![j])
    }

    pub fn features(&self) -> Vec<usize> {
        match self {
            Transform::Permute(f) | Transform::Drop(f) => f.clone(),
            Transform::ConditionalPermute(j) => vec![*j],
        }
    }

    pub fn apply(&self, ds: &Dataset, seed: u64) -> Result<Dataset> {
        match self {
            Transform::Permute(f) => permute_features(ds, f, seed),
            Transform::Drop(f) => drop_features(ds, f),
            Transform::ConditionalPermute(j) => {
                let strata = default_strata(ds, *j, derive_seed(seed, TAG_TRANSFORM, 1))?;
                conditional_permute_feature(ds, *j, &strata, seed)
            }
        }
    }

    /// Map a point in the original feature layout to the transformed one.
    pub fn apply_point(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Transform::Drop(f) => drop_coordinates(x, f),
            _ => x.to_vec(),
        }
    }

    pub fn apply_points(&self, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        xs.iter().map(|x| self.apply_point(x)).collect()
    }
}

/// Forests on original (`omega`) and transformed (`pi`) data; tree `b` of
/// each was fitted on the same row draw with the same seed.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedForests {
    pub omega: Forest,
    pub pi: Forest,
    pub transform: Transform,
}

impl PairedForests {
    pub fn len(&self) -> usize {
        self.omega.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.trees.is_empty()
    }

    /// Check that both forests were built from the same draws.
    pub fn is_aligned(&self) -> bool {
        self.omega.trees.len() == self.pi.trees.len()
            && self.omega.params.b == self.pi.params.b
            && self.omega.params.scheme == self.pi.params.scheme
            && self
                .omega
                .trees
                .iter()
                .zip(&self.pi.trees)
                .all(|(a, b)| a.in_sample == b.in_sample)
    }
    /// Moments of `D = f_omega - f_pi` at `points` for forests fitted in
    /// anchored groups.
    pub fn difference_moments(&self, points: &[Vec<f64>], zeta1: ZetaOneEstimator) -> Result<Moments> {
        let groups = self
            .omega
            .groups
            .as_ref()
            .ok_or_else(|| Error::InvalidParam("forests were not fitted in anchored groups".into()))?;
        let design = GroupDesign {
            n_z: groups.n_z,
            n_mc: groups.n_mc,
            zeta1,
        };
        let n = self.omega.n_train;
        let k = self.omega.params.resolved_k(n)?;
        let alt_points = self.transform.apply_points(points);
        let omega_preds = self.omega.tree_predictions(points)?;
        let pi_preds = self.pi.tree_predictions(&alt_points)?;
        let diffs: Vec<Vec<f64>> = omega_preds
            .iter()
            .zip(&pi_preds)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        let omega_mean = self.omega.predict_many(points)?;
        let pi_mean = self.pi.predict_many(&alt_points)?;
        let mean = omega_mean.iter().zip(&pi_mean).map(|(a, b)| a - b).collect();
        Ok(Moments {
            points: points.to_vec(),
            mean,
            cov: grouped_covariance(&diffs, &design, n, k),
            meta: MomentsMeta {
                n,
                k,
                n_z: design.n_z,
                n_mc: design.n_mc,
            },
        })
    }
}

fn check_features(ds: &Dataset, transform: &Transform) -> Result<()> {
    for j in transform.features() {
        if j >= ds.p() {
            return Err(Error::IndexOutOfRange { index: j, len: ds.p() });
        }
    }
    Ok(())
}

fn fit_pair(
    ds: &Dataset,
    params: &ForestParams,
    transform: &Transform,
    transform_seed: u64,
    plans: &[TreePlan],
    groups: Option<crate::forest::Grouping>,
) -> Result<PairedForests> {
    let alt = transform.apply(ds, transform_seed)?;
    // an explicit mtry cannot exceed the feature count left after a drop
    let mut pi_params = params.clone();
    pi_params.tree.mtry = params.tree.mtry.map(|m| m.min(alt.p().max(1)));
    let omega = fit_planned(ds, &params.tree, plans)?;
    let pi_trees = fit_planned(&alt, &pi_params.tree, plans)?;
    Ok(PairedForests {
        omega: assemble(ds, params, omega, groups.clone()),
        pi: assemble(&alt, &pi_params, pi_trees, groups),
        transform: transform.clone(),
    })
}

/// Ungrouped pair of forests, for accuracy comparisons and tree swapping.
pub fn fit_paired_forests(
    ds: &Dataset,
    params: &ForestParams,
    transform: &Transform,
    transform_seed: u64,
) -> Result<PairedForests> {
    params.validate(ds)?;
    check_features(ds, transform)?;
    let plans = plan_trees(ds.n(), params)?;
    fit_pair(ds, params, transform, transform_seed, &plans, None)
}

/// Grouped pair of forests plus the moments of their prediction
/// difference `D = f_omega - f_pi` at `points`.
pub fn fit_paired(
    ds: &Dataset,
    params: &ForestParams,
    transform: &Transform,
    transform_seed: u64,
    points: &[Vec<f64>],
    design: GroupDesign,
) -> Result<(PairedForests, Moments)> {
    design.check(params)?;
    let params = ForestParams {
        b: design.trees(),
        ..params.clone()
    };
    params.validate(ds)?;
    check_features(ds, transform)?;
    let (plans, grouping) = plan_grouped(ds.n(), &params, design.n_z, design.n_mc)?;
    let paired = fit_pair(ds, &params, transform, transform_seed, &plans, Some(grouping))?;

    let moments = paired.difference_moments(points, design.zeta1)?;
    Ok((paired, moments))
}
