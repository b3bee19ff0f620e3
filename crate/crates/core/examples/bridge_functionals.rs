//! Monte Carlo of the Gaussian limit functionals against their exact variances.
//!
//! cargo run --release --example bridge_functionals

use censtail::estimators::VarianceForm;
use censtail::gausslimit::{kernel_variances, LimitParams};
use censtail::montecarlo::run_limit_experiment;

fn main() -> censtail::Result<()> {
    // γ₁ = 0.5 against a Fréchet(0.5) censor: p = 1/2, θ = 1/2.
    let params = LimitParams::new(0.5, 0.5, 0.5, 0.005, 512)?;
    let exact = kernel_variances(&params);
    let report = run_limit_experiment(&params, 20_000, 42)?;

    let g = report.gamma;
    println!("tail index functional");
    println!("  mc variance      {:.4} ± {:.4}", g.empirical_var.unwrap(), g.var_standard_error.unwrap());
    println!("  exact at t0      {:.4}", exact.gamma);
    println!("  γ₁²/p            {:.4}", params.gamma_target_var(VarianceForm::Quotient));
    println!("  pγ₁²             {:.4}", params.gamma_target_var(VarianceForm::Product));

    let p = report.premium.expect("γ₁ < 1");
    println!("premium functional");
    println!("  mc variance      {:.4} ± {:.4}", p.empirical_var.unwrap(), p.var_standard_error.unwrap());
    println!("  exact at t0      {:.4}", exact.premium.unwrap());
    println!("  quotient form    {:.4}", p.target_var);
    println!("  product form     {:.4}", p.nominal_target_var);
    Ok(())
}
