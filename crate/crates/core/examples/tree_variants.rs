// The tree and sampling variants side by side: bootstrap bagging, plain
// subsampling, subsampling with replacement, random splits and honest
// trees, all scored on the same held-out data.

use rfinfer::experiments::{gen_linear, LinearScenario};
use rfinfer::forest::{fit_forest, ForestParams, Scheme};
use rfinfer::stats::mse;
use rfinfer::tree::TreeParams;

pub fn run_example() -> rfinfer::Result<()> {
    let sc = LinearScenario { n: 400, n_test: 400, p: 5, s: 3, rho: 0.3, snr: 2.0, seed: 3 };
    let (train, test) = gen_linear(&sc);
    let base = ForestParams { b: 100, seed: 1, ..Default::default() };
    let variants = [
        ("bootstrap", ForestParams { scheme: Scheme::Bootstrap, ..base.clone() }),
        ("subsample k=n/2", base.clone()),
        ("with replacement", ForestParams { scheme: Scheme::SubsampleWithReplacement, ..base.clone() }),
        ("random splits 0.5", ForestParams { tree: TreeParams { random_split_prob: 0.5, ..base.tree.clone() }, ..base.clone() }),
        ("honest", ForestParams { tree: TreeParams { honest: true, ..base.tree.clone() }, ..base.clone() }),
    ];
    for (label, params) in variants {
        let forest = fit_forest(&train, &params)?;
        let err = mse(&forest.predict_many(&test.rows())?, test.response());
        println!("{label:<18} test MSE {err:.3}");
    }
    Ok(())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
