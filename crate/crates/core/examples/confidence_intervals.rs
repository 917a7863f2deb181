// Confidence intervals for forest predictions. Trees are fitted in
// anchored groups so the U-statistic variance can be estimated from the
// same forest that produces the prediction.

use rfinfer::experiments::{gen_linear, LinearScenario};
use rfinfer::forest::ForestParams;
use rfinfer::inference::{confidence_interval, estimate_moments, GroupDesign};
use rfinfer::tree::TreeParams;

pub fn run_example() -> rfinfer::Result<()> {
    let sc = LinearScenario { n: 500, n_test: 5, p: 5, s: 1, rho: 0.0, snr: 2.0, seed: 1 };
    let (train, test) = gen_linear(&sc);
    let params = ForestParams {
        k: Some(50),
        tree: TreeParams { mtry: Some(5), ..Default::default() },
        seed: 2,
        ..Default::default()
    };
    let (_, mom) = estimate_moments(&train, &params, &test.rows(), GroupDesign::new(50, 20))?;
    println!("{:>8} {:>8} {:>18}", "x1", "pred", "95% interval");
    for i in 0..mom.dim() {
        let (lo, hi) = confidence_interval(&mom, i, 0.95)?;
        println!("{:>8.3} {:>8.3}   [{lo:>6.3}, {hi:>6.3}]", mom.points[i][0], mom.mean[i]);
    }
    Ok(())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
