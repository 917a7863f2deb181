// Every importance measure on one dataset where `x2` is a correlated proxy
// for `x1` but carries no signal of its own. The repredict-only measures
// come with a caveat attached to their reports.

use rfinfer::experiments::CorrelatedPair;
use rfinfer::forest::{fit_forest, ForestParams};
use rfinfer::importance::{
    impurity_importance, oob_permutation_importance, rebuild_importance_report, write_reports_csv, RebuildMode,
};

pub fn run_example() -> rfinfer::Result<()> {
    let gen = |seed| CorrelatedPair { n: 400, rho: 0.9, noise_sd: 0.5, seed }.generate();
    let (train, eval) = (gen(1), gen(2));
    let params = ForestParams { b: 100, seed: 3, ..Default::default() };
    let forest = fit_forest(&train, &params)?;
    let mut reports = vec![oob_permutation_importance(&forest, &train, 4)?, impurity_importance(&forest)];
    for mode in [RebuildMode::Permute, RebuildMode::Drop, RebuildMode::Conditional] {
        reports.push(rebuild_importance_report(&train, &params, mode, &eval, 5)?);
    }
    for r in &reports {
        let order: Vec<&str> = r.ranking().iter().map(|&j| r.features[j].as_str()).collect();
        println!("{:<28} ranking {:?}", r.method.as_str(), order);
    }
    write_reports_csv(&reports, std::io::stdout())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
