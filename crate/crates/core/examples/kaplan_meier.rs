//! Kaplan–Meier survival at the upper order statistics versus the true F̄.
//!
//! cargo run --release --example kaplan_meier

use censtail::estimators::{kaplan_meier_survival, SortedSample};
use censtail::models::{CensoringSetup, TailModel};

fn main() -> censtail::Result<()> {
    let x = TailModel::frechet(0.6)?;
    let setup = CensoringSetup::new(x, TailModel::frechet(0.9)?);
    let n = 20_000;
    let sorted = SortedSample::from(&setup.sample(n, 5)?);

    println!("{:>6} {:>12} {:>12} {:>12}", "n-m", "z", "KM", "true F̄(z)");
    for k in [5000, 1000, 500, 100, 20] {
        let m = n - k;
        let z = sorted.z_sorted()[m - 1];
        let km = kaplan_meier_survival(&sorted, m)?;
        println!("{:>6} {:>12.4} {:>12.6} {:>12.6}", k, z, km, x.survival(z)?);
    }
    Ok(())
}
