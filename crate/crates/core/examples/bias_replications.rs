// Two known importance biases. A correlated proxy gains OOB permutation
// importance it does not deserve, while drop-and-rebuild scores it near
// zero. A many-valued noise feature wins impurity importance, while the
// tree-swap test treats both noise features alike.

use rfinfer::experiments::{run_cardinality, run_correlated_pair, CardinalityConfig, CorrelatedPairConfig};

pub fn run_example() -> rfinfer::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let mut pair = CorrelatedPairConfig::default();
    let mut card = CardinalityConfig::default();
    if !full {
        pair.runs = 10;
        pair.forest.b = 50;
        card.runs = 10;
        card.forest.b = 50;
    }
    let p = run_correlated_pair(&pair)?.summary;
    println!(
        "correlated pair: OOB ranks x2 over x3 in {:.2} of runs; drop-rebuild x2 = {:.4} (se {:.4})",
        p.oob_x2_over_x3, p.drop_x2_mean, p.drop_x2_se
    );
    let c = run_cardinality(&card)?.summary;
    println!(
        "cardinality: 1000-level feature wins impurity in {:.2} of runs; tree-swap rejection {:?}",
        c.high_over_low, c.swap_rejection
    );
    Ok(())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
