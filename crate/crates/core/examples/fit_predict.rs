// Fit a subsampled forest on CSV data, check its out-of-bag error, save it
// as JSON and predict from the reloaded model.

use rfinfer::data::{load_csv_reader, load_feature_rows, ColumnSchema};
use rfinfer::forest::{fit_forest, oob_error, Forest, ForestParams};
use rfinfer::tree::TreeParams;

/// Forty listings: price rises with size, houses cost more than flats.
fn listings_csv() -> String {
    let mut csv = String::from("size,kind,price\n");
    for i in 0..40 {
        let size = 1.0 + 0.125 * i as f64;
        let (kind, premium) = if i % 2 == 0 { ("flat", 0.0) } else { ("house", 10.0) };
        let wiggle = ((i * 7) % 5) as f64 - 2.0;
        csv.push_str(&format!("{size},{kind},{:.1}\n", 8.0 * size + premium + wiggle));
    }
    csv
}

pub fn run_example() -> rfinfer::Result<()> {
    let schema = ColumnSchema::from_json_str(r#"{"size": "numeric", "kind": "categorical", "price": "response"}"#)?;
    let ds = load_csv_reader(listings_csv().as_bytes(), &schema)?;
    let params = ForestParams {
        b: 200,
        k: Some(20),
        tree: TreeParams { min_leaf: 2, ..Default::default() },
        seed: 7,
        ..Default::default()
    };
    let forest = fit_forest(&ds, &params)?;
    println!("{} trees, OOB MSE {:.3}", forest.trees.len(), oob_error(&forest, &ds)?);

    let json = forest.to_json()?;
    let reloaded = Forest::from_json(&json)?;
    let points = load_feature_rows("size,kind\n2.2,house\n2.2,flat\n".as_bytes(), &reloaded.schema)?;
    for (x, y) in points.iter().zip(reloaded.predict_many(&points)?) {
        println!("{x:?} -> {y:.2}");
    }
    assert_eq!(reloaded.predict_many(&points)?, forest.predict_many(&points)?);
    Ok(())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
