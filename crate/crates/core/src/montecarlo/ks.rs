//! One-sample Kolmogorov–Smirnov test against a normal law.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kolmogorov survival function `Q(λ) = 2 Σⱼ≥₁ (−1)^(j−1) exp(−2j²λ²)`.
///
/// The alternating series is summed until a term drops below 1e-12. For
/// small `λ` it converges too slowly to be useful, and the equivalent form
/// `1 − (√(2π)/λ) Σⱼ≥₁ exp(−(2j−1)²π²/(8λ²))` is used instead.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for j in 1..=100 {
            let odd = (2 * j - 1) as f64;
            let term = (c * odd * odd).exp();
            sum += term;
            if term < 1e-16 {
                break;
            }
        }
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=1000 {
        let jf = j as f64;
        let term = 2.0 * (-2.0 * jf * jf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

/// KS statistic `Dₘ` of `values` against N(mu, sigma²), with the asymptotic
/// p-value `Q((√m + 0.12 + 0.11/√m) Dₘ)`.
pub fn ks_normality(values: &[f64], mu: f64, sigma: f64) -> Result<KsResult> {
    if values.len() < 20 {
        return Err(Error::domain(format!(
            "KS test needs at least 20 values, got {}",
            values.len()
        )));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("KS input contains NaN"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal::cdf((x - mu) / sigma);
            let above = (i + 1) as f64 / m - f;
            let below = f - i as f64 / m;
            above.max(below)
        })
        .fold(0.0, f64::max);
    let root = m.sqrt();
    let lambda = (root + 0.12 + 0.11 / root) * statistic;
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_q(lambda),
    })
}
