//! Replicated estimation: bias, variance and interval coverage across k.
//!
//! cargo run --release --example coverage_experiment

use censtail::estimators::VarianceForm;
use censtail::models::{CensoringSetup, TailModel};
use censtail::montecarlo::{run_estimation_experiment, ExperimentConfig};

fn main() -> censtail::Result<()> {
    let config = ExperimentConfig {
        setup: CensoringSetup::new(TailModel::frechet(0.6)?, TailModel::frechet(0.9)?),
        n: 30_000,
        k_grid: vec![100, 250, 500, 1000, 2000],
        reps: 500,
        master_seed: 42,
        alpha: 0.05,
        variance_form: VarianceForm::Quotient,
    };
    let report = run_estimation_experiment(&config)?;

    println!("{:>5} {:>8} {:>9} {:>9} {:>9} {:>9}", "k", "mean", "√k·bias", "k·var", "target", "coverage");
    for r in &report.records {
        println!(
            "{:>5} {:>8.4} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            r.k,
            r.mean_gamma1.unwrap(),
            r.scaled_bias.unwrap(),
            r.scaled_var.unwrap(),
            r.target_var,
            r.coverage.unwrap()
        );
    }
    Ok(())
}
