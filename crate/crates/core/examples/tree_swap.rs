// Tree-swap permutation test. Two tree-aligned forests differ only in
// whether a feature was permuted before fitting; swapping aligned trees
// between them at random gives a null distribution for their gap in
// held-out error. Subsamples should be small relative to n.

use rfinfer::experiments::{gen_linear, LinearScenario};
use rfinfer::forest::ForestParams;
use rfinfer::inference::{fit_paired_forests, tree_swap_test, Transform};

pub fn run_example() -> rfinfer::Result<()> {
    let sc = LinearScenario { n: 500, n_test: 200, p: 5, s: 1, rho: 0.0, snr: 2.0, seed: 6 };
    let (train, test) = gen_linear(&sc);
    let params = ForestParams { b: 100, k: Some(train.n() / 20), seed: 8, ..Default::default() };
    for j in [0, 4] {
        let paired = fit_paired_forests(&train, &params, &Transform::permute(j), 12)?;
        let t = tree_swap_test(&paired, &test, 199, 13)?;
        println!("feature {j}: MSE gap {:.4}, p = {:.3}", t.statistic, t.p_value);
    }
    let same = fit_paired_forests(&train, &params, &Transform::Permute(vec![]), 12)?;
    println!("identical forests: p = {}", tree_swap_test(&same, &test, 199, 13)?.p_value);
    Ok(())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
