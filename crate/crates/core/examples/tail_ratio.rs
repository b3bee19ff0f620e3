//! (1/t) H̄¹(z H⁻¹(1−t)) approaching p z^(−1/γ) as t → 0.
//!
//! cargo run --release --example tail_ratio

use censtail::models::{CensoringSetup, TailModel};

fn main() -> censtail::Result<()> {
    let setups = [
        ("pareto/pareto", CensoringSetup::new(TailModel::pareto(0.6)?, TailModel::pareto(0.9)?)),
        ("frechet/frechet", CensoringSetup::new(TailModel::frechet(0.6)?, TailModel::frechet(0.9)?)),
        ("burr/frechet", CensoringSetup::new(TailModel::burr(0.6, -0.5)?, TailModel::frechet(0.9)?)),
    ];
    for (name, setup) in &setups {
        println!("{name}");
        for z in [1.0, 2.0, 5.0] {
            let target = setup.subdist_ratio_limit(z);
            let row: Vec<String> = [1e-2, 1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&t| setup.subdist_ratio(z, t).map(|r| format!("{:.2e}", (r / target - 1.0).abs())))
                .collect::<Result<_, _>>()?;
            println!("  z = {z}: rel. error at t = 1e-2..1e-5: {}", row.join("  "));
        }
    }
    Ok(())
}
