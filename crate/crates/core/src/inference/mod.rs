//! Inference for subsampled forests.
//!
//! Predictions of a subsampled forest at a set of points are treated as an
//! incomplete U-statistic. Trees are fitted in `n_z` anchored groups of
//! `n_mc` trees, every tree in a group sharing one fixed training row, and
//! the covariance of the prediction vector is estimated as
//!
//! ```text
//! Sigma = (k^2 / n) * zeta_1 + zeta_k / B
//! ```
//!
//! where `zeta_1` comes from the spread of group means and `zeta_k` from
//! the spread of individual trees. On top of that sit normal confidence
//! intervals, chi-squared tests of paired-forest differences and of grid
//! contrasts, and a tree-swap permutation test.

mod chi2;
mod grid;
mod moments;
mod paired;
mod swap;

pub use chi2::{chi2_test, Regularization};
pub use grid::{test_effect, test_interaction, EffectGrid, InteractionGrid};
pub use moments::{confidence_interval, estimate_moments, grouped_moments, GroupDesign, Moments, MomentsMeta, ZetaOneEstimator};
pub use paired::{fit_paired, fit_paired_forests, PairedForests, Transform};
pub use swap::tree_swap_test;

use serde::{Deserialize, Serialize};

/// Outcome of any of the tests in this module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: String,
    pub statistic: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_perm: Option<usize>,
    pub p_value: f64,
    #[serde(default)]
    pub projection_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub diff: Option<Vec<f64>>,
}

impl TestResult {
    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }

    pub fn with_method(mut self, method: &str) -> Self {
        self.method = method.to_string();
        self
    }
}
