//! Replicated experiments: estimator behaviour on simulated censored data and
//! Monte Carlo over bridge paths for the limit functionals.
//!
//! Replication `r` uses the stream key `derive_key(master_seed, r)`, results
//! are collected in replication order and aggregated serially, so a report
//! does not depend on the number of worker threads.

mod ks;

pub use ks::{kolmogorov_q, ks_normality, KsResult};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, EstimationError, Result};
use crate::estimators::{
    asymptotic_ci, premium_from_fit, premium_variance, tail_index_variance, SortedSample,
    VarianceForm,
};
use crate::gausslimit::{functionals, kernel_variances, simulate_bridge, LimitParams};
use crate::models::CensoringSetup;
use crate::rng::derive_key;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Mean and unbiased variance; the variance is `None` below two values.
pub(crate) fn moments(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mut s = CompensatedSum::default();
    xs.iter().for_each(|&x| s.add(x));
    let mean = s.value() / n;
    if xs.len() < 2 {
        return (Some(mean), None);
    }
    let mut ss = CompensatedSum::default();
    xs.iter().for_each(|&x| ss.add((x - mean) * (x - mean)));
    (Some(mean), Some(ss.value() / (n - 1.0)))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub setup: CensoringSetup,
    pub n: usize,
    pub k_grid: Vec<usize>,
    pub reps: usize,
    pub master_seed: u64,
    pub alpha: f64,
    pub variance_form: VarianceForm,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::domain(format!("n must be at least 3, got {}", self.n)));
        }
        if self.reps == 0 {
            return Err(Error::domain("reps must be at least 1"));
        }
        if self.k_grid.is_empty() {
            return Err(Error::domain("k grid is empty"));
        }
        if let Some(&k) = self.k_grid.iter().find(|&&k| !(k > 1 && k < self.n)) {
            return Err(Error::domain(format!("k = {k} must satisfy 1 < k < n = {}", self.n)));
        }
        let mut sorted = self.k_grid.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("k grid contains duplicates"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Truth {
    pub gamma1: f64,
    pub gamma_z: f64,
    pub p: f64,
    pub theta: f64,
}

/// Aggregates for one `k`.
#[derive(Debug, Clone, Serialize)]
pub struct KRecord {
    pub k: usize,
    /// Replications where `p̂ = 0`; excluded from every statistic below.
    pub failures: usize,
    pub successes: usize,
    pub mean_gamma1: Option<f64>,
    pub var_gamma1: Option<f64>,
    pub mean_p_hat: Option<f64>,
    /// Sample variance of `√k(γ̂₁ − γ₁)`.
    pub scaled_var: Option<f64>,
    /// `√k(mean γ̂₁ − γ₁)`.
    pub scaled_bias: Option<f64>,
    /// `γ₁²/p`.
    pub target_var: f64,
    /// `pγ₁²`.
    pub nominal_target_var: f64,
    /// KS test of `√k(γ̂₁ − γ₁)/√v` against N(0,1), `v` per the configured
    /// variance form; `None` below 20 successes.
    pub ks: Option<KsResult>,
    pub coverage: Option<f64>,
    pub premium: PremiumRecord,
    #[serde(skip)]
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PremiumRecord {
    /// Replications with `γ̂₁ ≥ 1` (on top of the `p̂ = 0` failures).
    pub failures: usize,
    /// `h = H⁻¹(1 − k/n)`.
    pub retention: f64,
    /// `Π(h)`.
    pub true_premium: Option<f64>,
    pub mean_premium: Option<f64>,
    /// Sample variance of `√k(Π̂ − Π(h))/(h F̄(h))`.
    pub scaled_var: Option<f64>,
    pub target_var: Option<f64>,
    pub nominal_target_var: Option<f64>,
    pub coverage: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub truth: Truth,
    pub records: Vec<KRecord>,
}

impl ExperimentReport {
    pub fn record(&self, k: usize) -> Option<&KRecord> {
        self.records.iter().find(|r| r.k == k)
    }

    /// Standardized estimates `√k(γ̂₁ − γ₁)/√v` for one `k`, in replication order.
    pub fn standardized(&self, k: usize, form: VarianceForm) -> Option<Vec<f64>> {
        let rec = self.record(k)?;
        let g1 = self.truth.gamma1;
        let sd = tail_index_variance(g1, self.truth.p, form).sqrt();
        let root_k = (k as f64).sqrt();
        Some(rec.estimates.iter().map(|g| root_k * (g - g1) / sd).collect())
    }

    /// One row per `k`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record([
            "k",
            "successes",
            "failures",
            "mean_gamma1",
            "var_gamma1",
            "mean_p_hat",
            "scaled_var",
            "scaled_bias",
            "target_var",
            "nominal_target_var",
            "ks_statistic",
            "ks_p_value",
            "coverage",
            "premium_failures",
            "true_premium",
            "mean_premium",
            "premium_scaled_var",
            "premium_target_var",
            "premium_coverage",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.k.to_string(),
                r.successes.to_string(),
                r.failures.to_string(),
                opt(r.mean_gamma1),
                opt(r.var_gamma1),
                opt(r.mean_p_hat),
                opt(r.scaled_var),
                opt(r.scaled_bias),
                r.target_var.to_string(),
                r.nominal_target_var.to_string(),
                opt(r.ks.map(|k| k.statistic)),
                opt(r.ks.map(|k| k.p_value)),
                opt(r.coverage),
                r.premium.failures.to_string(),
                opt(r.premium.true_premium),
                opt(r.premium.mean_premium),
                opt(r.premium.scaled_var),
                opt(r.premium.target_var),
                opt(r.premium.coverage),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Clone, Copy)]
enum RepOutcome {
    Failed,
    Fit {
        gamma1: f64,
        p_hat: f64,
        covered: bool,
        premium: Option<(f64, bool)>,
    },
}

/// Per-`k` constants of the true model.
struct KTruth {
    retention: f64,
    true_premium: Option<f64>,
    norm: f64,
}

pub fn run_estimation_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let setup = &config.setup;
    let derived = setup.derived_params();
    let gamma1 = setup.model_x.gamma();
    let truth = Truth {
        gamma1,
        gamma_z: derived.gamma_z,
        p: derived.p,
        theta: setup.theta()?,
    };

    let k_truth = config
        .k_grid
        .iter()
        .map(|&k| {
            let retention = setup.h_quantile(k as f64 / config.n as f64)?;
            let true_premium = if gamma1 < 1.0 {
                Some(setup.model_x.excess_premium(retention)?)
            } else {
                None
            };
            Ok(KTruth {
                retention,
                true_premium,
                norm: retention * setup.model_x.sf(retention),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let outcomes: Vec<Vec<RepOutcome>> = (0..config.reps)
        .into_par_iter()
        .map(|r| -> Result<Vec<RepOutcome>> {
            let sample = setup.sample(config.n, derive_key(config.master_seed, r as u64))?;
            let sorted = SortedSample::from(&sample);
            config
                .k_grid
                .iter()
                .zip(&k_truth)
                .map(|(&k, kt)| replicate_at_k(&sorted, k, kt, gamma1, config))
                .collect()
        })
        .collect::<Result<_>>()?;

    let records = config
        .k_grid
        .iter()
        .enumerate()
        .map(|(j, &k)| aggregate_k(config, &truth, &k_truth[j], k, outcomes.iter().map(|o| o[j])))
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentReport {
        config: config.clone(),
        truth,
        records,
    })
}

fn replicate_at_k(
    sorted: &SortedSample,
    k: usize,
    kt: &KTruth,
    gamma1: f64,
    config: &ExperimentConfig,
) -> Result<RepOutcome> {
    let fit = match asymptotic_ci(sorted, k, config.alpha, config.variance_form) {
        Ok(fit) => fit,
        Err(Error::Estimation(_)) => return Ok(RepOutcome::Failed),
        Err(e) => return Err(e),
    };
    let premium = match (kt.true_premium, premium_from_fit(&fit, sorted)) {
        (Some(truth), Ok(pf)) => {
            let z = crate::normal::quantile(1.0 - config.alpha / 2.0);
            let covered = (pf.premium - truth).abs() <= z * pf.se_scaled;
            Some((pf.premium, covered))
        }
        (_, Err(Error::Estimation(_))) | (None, _) => None,
        (_, Err(e)) => return Err(e),
    };
    Ok(RepOutcome::Fit {
        gamma1: fit.gamma1_hat,
        p_hat: fit.p_hat,
        covered: fit.ci_low <= gamma1 && gamma1 <= fit.ci_high,
        premium,
    })
}

fn aggregate_k(
    config: &ExperimentConfig,
    truth: &Truth,
    kt: &KTruth,
    k: usize,
    outcomes: impl Iterator<Item = RepOutcome>,
) -> Result<KRecord> {
    let mut estimates = vec![];
    let mut p_hats = vec![];
    let mut covered = 0usize;
    let mut premiums = vec![];
    let mut premium_covered = 0usize;
    let mut failures = 0usize;
    let mut premium_failures = 0usize;
    for o in outcomes {
        match o {
            RepOutcome::Failed => failures += 1,
            RepOutcome::Fit {
                gamma1,
                p_hat,
                covered: c,
                premium,
            } => {
                estimates.push(gamma1);
                p_hats.push(p_hat);
                covered += usize::from(c);
                match premium {
                    Some((v, c)) => {
                        premiums.push(v);
                        premium_covered += usize::from(c);
                    }
                    None if kt.true_premium.is_some() => premium_failures += 1,
                    None => {}
                }
            }
        }
    }
    let successes = estimates.len();
    debug_assert_eq!(successes + failures, config.reps);
    if successes == 0 {
        return Err(EstimationError::AllReplicationsFailed { k, reps: config.reps }.into());
    }

    let g1 = truth.gamma1;
    let root_k = (k as f64).sqrt();
    let (mean_gamma1, var_gamma1) = moments(&estimates);
    let (mean_p_hat, _) = moments(&p_hats);
    let scaled: Vec<f64> = estimates.iter().map(|g| root_k * (g - g1)).collect();
    let (scaled_mean, scaled_var) = moments(&scaled);
    let ks = if successes >= 20 {
        let sd = tail_index_variance(g1, truth.p, config.variance_form).sqrt();
        Some(ks_normality(&scaled, 0.0, sd)?)
    } else {
        None
    };

    let premium = {
        let (mean_premium, _) = moments(&premiums);
        let scaled_var = kt.true_premium.and_then(|t| {
            let s: Vec<f64> = premiums.iter().map(|v| root_k * (v - t) / kt.norm).collect();
            moments(&s).1
        });
        let finite = g1 < 1.0;
        PremiumRecord {
            failures: premium_failures,
            retention: kt.retention,
            true_premium: kt.true_premium,
            mean_premium,
            scaled_var,
            target_var: finite.then(|| premium_variance(g1, truth.p, VarianceForm::Quotient)),
            nominal_target_var: finite.then(|| premium_variance(g1, truth.p, VarianceForm::Product)),
            coverage: (!premiums.is_empty()).then(|| premium_covered as f64 / premiums.len() as f64),
        }
    };

    Ok(KRecord {
        k,
        failures,
        successes,
        mean_gamma1,
        var_gamma1,
        mean_p_hat,
        scaled_var,
        scaled_bias: scaled_mean,
        target_var: tail_index_variance(g1, truth.p, VarianceForm::Quotient),
        nominal_target_var: tail_index_variance(g1, truth.p, VarianceForm::Product),
        ks,
        coverage: Some(covered as f64 / successes as f64),
        premium,
        estimates,
    })
}

/// Monte Carlo summary of one limit functional.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FunctionalSummary {
    pub empirical_mean: f64,
    pub empirical_var: Option<f64>,
    /// Asymptotic variance (`γ₁²/p`-type closed form).
    pub target_var: f64,
    /// Published closed form (`pγ₁²`-type).
    pub nominal_target_var: f64,
    /// Exact variance of the discretized functional at this `t0` and grid.
    pub finite_t0_var: f64,
    /// Standard error of `empirical_mean`.
    pub mc_standard_error: Option<f64>,
    /// Approximate standard error of `empirical_var` (normal theory).
    pub var_standard_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub params: LimitParams,
    pub reps: usize,
    pub seed: u64,
    pub gamma: FunctionalSummary,
    /// `None` when `γ₁ ≥ 1`.
    pub premium: Option<FunctionalSummary>,
    #[serde(skip)]
    pub gamma_values: Vec<f64>,
    #[serde(skip)]
    pub premium_values: Vec<f64>,
}

pub fn run_limit_experiment(params: &LimitParams, reps: usize, seed: u64) -> Result<LimitReport> {
    if reps == 0 {
        return Err(Error::domain("reps must be at least 1"));
    }
    let points = params.required_points();
    let values = (0..reps)
        .into_par_iter()
        .map(|r| {
            let path = simulate_bridge(&points, derive_key(seed, r as u64))?;
            functionals(&path, params)
        })
        .collect::<Result<Vec<_>>>()?;
    let gamma_values: Vec<f64> = values.iter().map(|v| v.gamma).collect();
    let premium_values: Vec<f64> = values.iter().filter_map(|v| v.premium).collect();
    let exact = kernel_variances(params);

    let summarize = |xs: &[f64], target: f64, nominal: f64, finite: f64| {
        let (mean, var) = moments(xs);
        let n = xs.len() as f64;
        FunctionalSummary {
            empirical_mean: mean.expect("reps >= 1"),
            empirical_var: var,
            target_var: target,
            nominal_target_var: nominal,
            finite_t0_var: finite,
            mc_standard_error: var.map(|v| (v / n).sqrt()),
            var_standard_error: var.map(|v| v * (2.0 / (n - 1.0)).sqrt()),
        }
    };
    let gamma = summarize(
        &gamma_values,
        params.gamma_target_var(VarianceForm::Quotient),
        params.gamma_target_var(VarianceForm::Product),
        exact.gamma,
    );
    let premium = match (
        params.premium_target_var(VarianceForm::Quotient),
        params.premium_target_var(VarianceForm::Product),
        exact.premium,
    ) {
        (Some(t), Some(n), Some(f)) => Some(summarize(&premium_values, t, n, f)),
        _ => None,
    };
    Ok(LimitReport {
        params: *params,
        reps,
        seed,
        gamma,
        premium,
        gamma_values,
        premium_values,
    })
}
