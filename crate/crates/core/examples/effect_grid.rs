// Grid test of a single feature: predictions on a grid of its values,
// crossed with fixed values of the other features, should not change along
// the feature if it has no effect.

use rfinfer::experiments::{gen_linear, LinearScenario};
use rfinfer::forest::ForestParams;
use rfinfer::inference::{test_effect, EffectGrid, GroupDesign};

pub fn run_example() -> rfinfer::Result<()> {
    let sc = LinearScenario { n: 500, p: 3, s: 1, rho: 0.0, snr: 3.0, seed: 4, ..Default::default() };
    let (train, _) = gen_linear(&sc);
    let params = ForestParams { k: Some(15), seed: 9, ..Default::default() };
    for j in 0..train.p() {
        let grid = EffectGrid::from_data(&train, j, 3, 4, 10 + j as u64)?;
        let t = test_effect(&train, &params, j, &grid, GroupDesign::new(50, 20))?;
        println!("feature {j}: p = {:.4}", t.p_value);
    }
    Ok(())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
