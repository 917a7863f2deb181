// Do two features interact? Second differences of predictions over a
// two-feature grid vanish when the surface is additive in them.

use rfinfer::experiments::{gen_surface, Surface};
use rfinfer::forest::ForestParams;
use rfinfer::inference::{test_interaction, GroupDesign, InteractionGrid};
use rfinfer::tree::TreeParams;

pub fn run_example() -> rfinfer::Result<()> {
    let params = ForestParams {
        k: Some(10),
        tree: TreeParams { min_leaf: 2, ..Default::default() },
        seed: 1,
        ..Default::default()
    };
    for surface in [Surface::Additive, Surface::Product] {
        let ds = gen_surface(1000, 3, surface, 3.0, 21);
        let grid = InteractionGrid {
            levels1: vec![-1.0, 1.0],
            levels2: vec![-1.0, 1.0],
            complements: (0..5).map(|c| vec![0.0, 0.0, c as f64 * 0.5 - 1.0]).collect(),
        };
        let t = test_interaction(&ds, &params, 0, 1, &grid, GroupDesign::new(50, 20))?;
        println!("{surface:?}: statistic {:.2}, p = {:.4}", t.statistic, t.p_value);
    }
    Ok(())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
