//! Excess-of-loss premium with retention at the (n−k)-th order statistic.
//!
//! cargo run --release --example premium

use censtail::estimators::{premium_estimate, SortedSample, VarianceForm};
use censtail::models::{CensoringSetup, TailModel};

fn main() -> censtail::Result<()> {
    let x = TailModel::frechet(0.6)?;
    let setup = CensoringSetup::new(x, TailModel::frechet(0.9)?);
    let sorted = SortedSample::from(&setup.sample(30_000, 3)?);

    for k in [250, 500, 1000] {
        let fit = premium_estimate(&sorted, k, VarianceForm::Quotient)?;
        let truth = x.excess_premium(fit.threshold)?;
        println!(
            "k = {k:>4}  R = {:>7.3}  premium = {:.4}  (true {:.4}, se {:.4})",
            fit.threshold, fit.premium, truth, fit.se_scaled
        );
    }
    Ok(())
}
