use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::TestResult;
use crate::stats::chi2_sf;

/// Stabilization policy for ill-conditioned covariance estimates.
///
/// When `lambda_max / lambda_min` exceeds `condition_limit` the test runs
/// in the span of the leading eigenvectors that capture `trace_fraction`
/// of the trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    pub condition_limit: f64,
    pub trace_fraction: f64,
}

impl Default for Regularization {
    fn default() -> Self {
        Self {
            condition_limit: 1e8,
            trace_fraction: 0.99,
        }
    }
}

/// Wald statistic `D' Sigma^-1 D` against chi-squared with `dim D` degrees
/// of freedom, or the projected version under [`Regularization`].
pub fn chi2_test(diff: &[f64], cov: &DMatrix<f64>, policy: Regularization) -> Result<TestResult> {
    let d = diff.len();
    if cov.nrows() != d || cov.ncols() != d {
        return Err(Error::DimensionMismatch {
            vector: d,
            matrix: cov.nrows(),
        });
    }
    let result = |statistic: f64, dof: usize, projection_dim: Option<usize>| TestResult {
        method: "chi2".into(),
        statistic,
        dof: Some(dof),
        n_perm: None,
        p_value: chi2_sf(statistic, dof),
        projection_dim,
        points: None,
        diff: Some(diff.to_vec()),
    };
    if diff.iter().all(|&v| v == 0.0) {
        return Ok(result(0.0, d.max(1), None));
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lambda: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if lambda[0] <= 0.0 {
        return Err(Error::ZeroCovariance);
    }
    let dv = DVector::from_column_slice(diff);
    let scores: Vec<f64> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).dot(&dv))
        .collect();

    let smallest = lambda[d - 1];
    let well_conditioned = smallest > 0.0 && lambda[0] / smallest <= policy.condition_limit;
    let r = if well_conditioned {
        d
    } else {
        let trace: f64 = lambda.iter().map(|l| l.max(0.0)).sum();
        let mut acc = 0.0;
        let mut r = 0;
        for &l in &lambda {
            if l <= 0.0 {
                break;
            }
            acc += l;
            r += 1;
            if acc >= policy.trace_fraction * trace {
                break;
            }
        }
        r
    };
    let statistic: f64 = (0..r).map(|i| scores[i] * scores[i] / lambda[i]).sum();
    Ok(result(statistic, r, (!well_conditioned).then_some(r)))
}
