use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::inference::{PairedForests, TestResult};
use crate::rng::rng_from_seed;

/// `MSE(B) - MSE(A)` where forest A uses `omega` trees except where
/// `swap[b]` is set, and forest B is its complement.
fn swapped_statistic(
    omega_sum: &[f64],
    pi_sum: &[f64],
    deltas: &[Vec<f64>],
    swap: &[bool],
    y: &[f64],
) -> f64 {
    let b = deltas.len() as f64;
    let mut shift = vec![0.0; y.len()];
    for (delta, _) in deltas.iter().zip(swap).filter(|(_, s)| **s) {
        for (acc, d) in shift.iter_mut().zip(delta) {
            *acc += d;
        }
    }
    let mut mse_a = 0.0;
    let mut mse_b = 0.0;
    for i in 0..y.len() {
        let a = (omega_sum[i] + shift[i]) / b;
        let bb = (pi_sum[i] - shift[i]) / b;
        mse_a += (a - y[i]).powi(2);
        mse_b += (bb - y[i]).powi(2);
    }
    (mse_b - mse_a) / y.len() as f64
}

/// Permutation test of `MSE_pi - MSE_omega` on held-out data, with the
/// null distribution formed by swapping each aligned tree pair with
/// probability one half.
pub fn tree_swap_test(paired: &PairedForests, eval: &Dataset, n_perm: usize, seed: u64) -> Result<TestResult> {
    if n_perm < 99 {
        return Err(Error::TooFewPermutations(n_perm));
    }
    if eval.n() == 0 {
        return Err(Error::EmptyEval);
    }
    if !paired.is_aligned() {
        return Err(Error::InvalidParam("forests are not tree-aligned".into()));
    }
    let xs = eval.rows();
    let alt = paired.transform.apply_points(&xs);
    let omega = paired.omega.tree_predictions(&xs)?;
    let pi = paired.pi.tree_predictions(&alt)?;
    let n = eval.n();
    let mut omega_sum = vec![0.0; n];
    let mut pi_sum = vec![0.0; n];
    for (o, p) in omega.iter().zip(&pi) {
        for i in 0..n {
            omega_sum[i] += o[i];
            pi_sum[i] += p[i];
        }
    }
    let deltas: Vec<Vec<f64>> = omega
        .iter()
        .zip(&pi)
        .map(|(o, p)| o.iter().zip(p).map(|(a, b)| b - a).collect())
        .collect();
    let y = eval.response();
    let trees = deltas.len();
    let observed = swapped_statistic(&omega_sum, &pi_sum, &deltas, &vec![false; trees], y);

    let mut rng = rng_from_seed(seed);
    let mut swap = vec![false; trees];
    let mut exceed = 0usize;
    for _ in 0..n_perm {
        for s in swap.iter_mut() {
            *s = rng.random_bool(0.5);
        }
        if swapped_statistic(&omega_sum, &pi_sum, &deltas, &swap, y) >= observed {
            exceed += 1;
        }
    }
    Ok(TestResult {
        method: "tree_swap".into(),
        statistic: observed,
        dof: None,
        n_perm: Some(n_perm),
        p_value: (1 + exceed) as f64 / (n_perm + 1) as f64,
        projection_dim: None,
        points: None,
        diff: None,
    })
}
