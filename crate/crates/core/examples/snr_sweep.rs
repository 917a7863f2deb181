// Random forest versus bagging across signal-to-noise ratios. The gain
// from feature subsampling is largest when the signal is weak. Pass
// `--full` for the full 50-replicate study; the default is a quick version.

use rfinfer::experiments::{run_snr_sweep, write_rows_csv, SnrSweepConfig};

pub fn run_example() -> rfinfer::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let mut cfg = SnrSweepConfig::default();
    if !full {
        cfg.replicates = 20;
        cfg.base.n = 200;
        cfg.base.n_test = 200;
        cfg.forest.b = 30;
        cfg.bagging.b = 30;
    }
    let result = run_snr_sweep(&cfg)?;
    write_rows_csv(&result.rows, std::io::stdout())?;
    for imp in &result.improvements {
        println!("snr {:>5}: relative improvement {:+.4} (se {:.4})", imp.snr, imp.improvement, imp.se);
    }
    Ok(())
}

fn main() -> rfinfer::Result<()> {
    run_example()
}
