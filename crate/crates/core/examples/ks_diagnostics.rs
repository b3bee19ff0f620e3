//! Kolmogorov–Smirnov checks of standardized estimates and a text QQ summary.
//!
//! cargo run --release --example ks_diagnostics

use censtail::estimators::VarianceForm;
use censtail::models::{CensoringSetup, TailModel};
use censtail::montecarlo::{ks_normality, run_estimation_experiment, ExperimentConfig};
use censtail::normal;

fn main() -> censtail::Result<()> {
    let k = 500;
    let config = ExperimentConfig {
        setup: CensoringSetup::new(TailModel::frechet(0.6)?, TailModel::frechet(0.9)?),
        n: 30_000,
        k_grid: vec![k],
        reps: 1000,
        master_seed: 7,
        alpha: 0.05,
        variance_form: VarianceForm::Quotient,
    };
    let report = run_estimation_experiment(&config)?;

    for form in [VarianceForm::Quotient, VarianceForm::Product] {
        let z = report.standardized(k, form).unwrap();
        let ks = ks_normality(&z, 0.0, 1.0)?;
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let centred: Vec<f64> = z.iter().map(|v| v - mean).collect();
        let ks_c = ks_normality(&centred, 0.0, 1.0)?;
        println!("{form:?}: D = {:.4}, p = {:.2e}; centred p = {:.2e}", ks.statistic, ks.p_value, ks_c.p_value);
    }

    let mut z = report.standardized(k, VarianceForm::Quotient).unwrap();
    z.sort_by(f64::total_cmp);
    println!("\n{:>8} {:>10} {:>10}", "prob", "normal", "sample");
    for prob in [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99] {
        let i = ((prob * z.len() as f64) as usize).min(z.len() - 1);
        println!("{prob:>8} {:>10.3} {:>10.3}", normal::quantile(prob), z[i]);
    }
    Ok(())
}
