// Is a feature used by the forest at all? Fit one forest on the data and a
// second, sharing every subsample, with the feature permuted. The vector of
// prediction differences at a set of points is tested against zero with a
// chi-squared statistic built from its estimated covariance.

use rfinfer::experiments::{gen_linear, LinearScenario};
use rfinfer::forest::ForestParams;
use rfinfer::inference::{chi2_test, fit_paired, GroupDesign, Regularization, Transform};

pub fn run_example() -> rfinfer::Result<()> {
    let sc = LinearScenario { n: 500, n_test: 5, p: 5, s: 1, rho: 0.0, snr: 3.0, seed: 11 };
    let (train, test) = gen_linear(&sc);
    let points = test.rows();
    let params = ForestParams { k: Some(15), seed: 3, ..Default::default() };
    for (j, label) in [(0, "signal x1"), (4, "null x5")] {
        let (_, mom) = fit_paired(&train, &params, &Transform::permute(j), 5, &points, GroupDesign::new(50, 20))?;
        let t = chi2_test(&mom.mean, &mom.cov, Regularization::default())?;
        println!("{label}: statistic {:.2} on {} dof, p = {:.4}", t.statistic, t.dof.unwrap_or(0), t.p_value);
    }
    Ok(())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
