//! Statistics of a censored sample.
//!
//! With `Z₁,ₙ ≤ … ≤ Zₙ,ₙ` the order statistics of the observed minima and
//! `δ[i:n]` the censoring indicator carried along with `Zᵢ,ₙ` (its
//! concomitant):
//!
//! ```text
//! Hill on Z:        γ̂   = (1/k) Σᵢ₌₁ᵏ ln Zₙ₋ᵢ₊₁,ₙ − ln Zₙ₋ₖ,ₙ
//! uncensored share: p̂   = (1/k) Σᵢ₌₁ᵏ δ[n−i+1:n]
//! adapted Hill:     γ̂₁  = γ̂ / p̂
//! Kaplan–Meier:     1 − Fₙ(Zₘ,ₙ) = Πᵢ₌₁ᵐ (1 − δ[i:n]/(n − i + 1))
//! premium:          Π̂   = γ̂₁/(1 − γ̂₁) · Zₙ₋ₖ,ₙ · (1 − Fₙ(Zₙ₋ₖ,ₙ))
//! ```
//!
//! `√k(γ̂₁ − γ₁)` is asymptotically centred normal with variance `γ₁²/p`
//! (see [`VarianceForm`]). Confidence intervals plug `γ̂₁` and `p̂` into that
//! variance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, EstimationError, Result};
use crate::models::CensoredSample;
use crate::normal;

/// Closed form used for the asymptotic variances of `γ̂₁` and `Π̂`.
///
/// `Quotient` is the variance of the Gaussian limit functional, obtained by
/// integrating the covariance kernel of the limiting processes:
///
/// ```text
/// Var √k(γ̂₁ − γ₁)              → γ₁²/p
/// Var √k(Π̂ − Π)/(h F̄(h))      → p²γ₁⁴/(1−γ₁)² + γ₁²/(p (1−γ₁)⁴)
/// ```
///
/// `Product` is the published closed form `pγ₁²` and
/// `pγ₁²/(1−γ₁)² · (pγ₁² + 1/(1−γ₁)²)`. It coincides with `Quotient` when
/// `p = 1` and understates the variance otherwise; it is kept so results can
/// be compared against those figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceForm {
    #[default]
    Quotient,
    Product,
}

/// Asymptotic variance of `√k(γ̂₁ − γ₁)`.
pub fn tail_index_variance(gamma1: f64, p: f64, form: VarianceForm) -> f64 {
    match form {
        VarianceForm::Quotient => gamma1 * gamma1 / p,
        VarianceForm::Product => p * gamma1 * gamma1,
    }
}

/// Asymptotic variance `σ_Π²` of `√k(Π̂ − Π)/(h F̄(h))`, for `γ₁ < 1`.
pub fn premium_variance(gamma1: f64, p: f64, form: VarianceForm) -> f64 {
    let g2 = gamma1 * gamma1;
    let c = 1.0 - gamma1;
    match form {
        VarianceForm::Quotient => p * p * g2 * g2 / (c * c) + g2 / (p * c.powi(4)),
        VarianceForm::Product => p * g2 / (c * c) * (p * g2 + 1.0 / (c * c)),
    }
}

/// Observations sorted ascending with their concomitant indicators.
///
/// The sort is stable: tied `z` values keep their input order, so with tied
/// data the concomitants depend on that order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    z: Vec<f64>,
    delta: Vec<bool>,
}

impl SortedSample {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z_sorted(&self) -> &[f64] {
        &self.z
    }

    pub fn delta_concomitant(&self) -> &[bool] {
        &self.delta
    }

    /// `Zₙ₋ₖ,ₙ`.
    pub fn threshold(&self, k: usize) -> Result<f64> {
        self.check_k(k)?;
        Ok(self.z[self.len() - k - 1])
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k >= self.len() {
            return Err(Error::domain(format!(
                "k must satisfy 1 <= k < n = {}, got {k}",
                self.len()
            )));
        }
        Ok(())
    }
}

impl From<&CensoredSample> for SortedSample {
    fn from(sample: &CensoredSample) -> Self {
        sort_with_concomitants(sample)
    }
}

pub fn sort_with_concomitants(sample: &CensoredSample) -> SortedSample {
    let mut order: Vec<usize> = (0..sample.len()).collect();
    let z = sample.z();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]));
    SortedSample {
        z: order.iter().map(|&i| z[i]).collect(),
        delta: order.iter().map(|&i| sample.delta()[i]).collect(),
    }
}

/// Hill estimator on the top `k` observed values.
pub fn hill(sorted: &SortedSample, k: usize) -> Result<f64> {
    let threshold = sorted.threshold(k)?;
    if !(threshold > 0.0) {
        return Err(Error::domain(format!("threshold order statistic {threshold} is not positive")));
    }
    let log_t = threshold.ln();
    let n = sorted.len();
    let sum: f64 = sorted.z[n - k..].iter().map(|z| z.ln() - log_t).sum();
    Ok(sum / k as f64)
}

/// Share of uncensored observations among the top `k`.
pub fn uncensored_fraction(sorted: &SortedSample, k: usize) -> Result<f64> {
    sorted.check_k(k)?;
    let n = sorted.len();
    let count = sorted.delta[n - k..].iter().filter(|&&d| d).count();
    Ok(count as f64 / k as f64)
}

pub fn adapted_hill(sorted: &SortedSample, k: usize) -> Result<f64> {
    let p_hat = uncensored_fraction(sorted, k)?;
    if p_hat == 0.0 {
        return Err(EstimationError::NoUncensoredExtremes { k }.into());
    }
    Ok(hill(sorted, k)? / p_hat)
}

/// Kaplan–Meier survival `1 − Fₙ(Zₘ,ₙ)` for `0 ≤ m ≤ n`.
///
/// Consecutive uncensored factors telescope, `Πᵢ₌ₐᵇ (n−i)/(n−i+1) =
/// (n−b)/(n−a+1)`, so each run is applied as one ratio. Without censoring
/// the result is exactly the empirical survival `(n − m)/n`.
pub fn kaplan_meier_survival(sorted: &SortedSample, m: usize) -> Result<f64> {
    let n = sorted.len();
    if m > n {
        return Err(Error::domain(format!("m must satisfy 0 <= m <= n = {n}, got {m}")));
    }
    let mut survival = 1.0;
    let mut run_start: Option<usize> = None;
    for i in 1..=m {
        if sorted.delta[i - 1] {
            run_start.get_or_insert(i);
        } else if let Some(a) = run_start.take() {
            survival *= (n - (i - 1)) as f64 / (n - a + 1) as f64;
        }
    }
    if let Some(a) = run_start {
        survival *= (n - m) as f64 / (n - a + 1) as f64;
    }
    Ok(survival)
}

/// Where the `k` of a fit came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KSource {
    /// A single value supplied by the caller.
    #[default]
    User,
    /// One point of a caller-supplied grid.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub k: usize,
    pub k_source: KSource,
    pub gamma_hat_z: f64,
    pub p_hat: f64,
    pub gamma1_hat: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub alpha: f64,
    pub variance_form: VarianceForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PremiumFit {
    pub k: usize,
    pub k_source: KSource,
    pub premium: f64,
    pub gamma1_hat: f64,
    pub km_survival_at_threshold: f64,
    pub threshold: f64,
    /// Standard error of `Π̂`: `σ̂_Π · Zₙ₋ₖ,ₙ (1 − Fₙ(Zₙ₋ₖ,ₙ)) / √k`.
    pub se_scaled: f64,
    pub variance_form: VarianceForm,
}

/// Adapted Hill estimate with a normal-approximation interval at level
/// `1 − alpha`: `γ̂₁ ∓ z₁₋α/₂ · se`, `se = √(v(γ̂₁, p̂)/k)`.
pub fn asymptotic_ci(
    sorted: &SortedSample,
    k: usize,
    alpha: f64,
    form: VarianceForm,
) -> Result<TailFit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let gamma_hat_z = hill(sorted, k)?;
    let p_hat = uncensored_fraction(sorted, k)?;
    if p_hat == 0.0 {
        return Err(EstimationError::NoUncensoredExtremes { k }.into());
    }
    let gamma1_hat = gamma_hat_z / p_hat;
    let se = (tail_index_variance(gamma1_hat, p_hat, form) / k as f64).sqrt();
    let z = normal::quantile(1.0 - alpha / 2.0).max(0.0);
    Ok(TailFit {
        k,
        k_source: KSource::User,
        gamma_hat_z,
        p_hat,
        gamma1_hat,
        se,
        ci_low: gamma1_hat - z * se,
        ci_high: gamma1_hat + z * se,
        alpha,
        variance_form: form,
    })
}

/// Standard error of `Π̂` from a tail fit on the same sample.
pub fn premium_se(fit: &TailFit, sorted: &SortedSample, k: usize) -> Result<f64> {
    if fit.gamma1_hat >= 1.0 {
        return Err(EstimationError::InfiniteMean {
            gamma1_hat: fit.gamma1_hat,
        }
        .into());
    }
    let sigma = premium_variance(fit.gamma1_hat, fit.p_hat, fit.variance_form).sqrt();
    let scale = sorted.threshold(k)? * kaplan_meier_survival(sorted, sorted.len() - k)?;
    Ok(sigma * scale / (k as f64).sqrt())
}

/// Excess-of-loss premium with retention `Zₙ₋ₖ,ₙ`.
pub fn premium_estimate(sorted: &SortedSample, k: usize, form: VarianceForm) -> Result<PremiumFit> {
    let fit = asymptotic_ci(sorted, k, 0.05, form)?;
    premium_from_fit(&fit, sorted)
}

/// Premium built on an existing [`TailFit`] (reuses its `γ̂₁`, `p̂`, `k`).
pub fn premium_from_fit(fit: &TailFit, sorted: &SortedSample) -> Result<PremiumFit> {
    let k = fit.k;
    let gamma1_hat = fit.gamma1_hat;
    if gamma1_hat >= 1.0 {
        return Err(EstimationError::InfiniteMean { gamma1_hat }.into());
    }
    let threshold = sorted.threshold(k)?;
    let km = kaplan_meier_survival(sorted, sorted.len() - k)?;
    Ok(PremiumFit {
        k,
        k_source: fit.k_source,
        premium: assemble_premium(gamma1_hat, threshold, km),
        gamma1_hat,
        km_survival_at_threshold: km,
        threshold,
        se_scaled: premium_se(fit, sorted, k)?,
        variance_form: fit.variance_form,
    })
}

/// `γ₁/(1 − γ₁) · R · s`.
pub fn assemble_premium(gamma1: f64, retention: f64, survival: f64) -> f64 {
    gamma1 / (1.0 - gamma1) * retention * survival
}
