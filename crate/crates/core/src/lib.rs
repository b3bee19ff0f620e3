//! Tail-index and excess-of-loss premium estimation for randomly censored
//! heavy-tailed data.
//!
//! The crate is organised around four pieces:
//!
//! - [`models`]: Fréchet, Burr and Pareto marginals, censored sampling and the
//!   tail functions `H̄`, `H̄¹`, `H⁻¹`, `θ` of the censoring model.
//! - [`estimators`]: order statistics with concomitants, the Hill and adapted
//!   Hill estimators, Kaplan–Meier survival, the premium estimator and
//!   normal-approximation intervals.
//! - [`gausslimit`]: Brownian bridges sampled exactly at finite point sets and
//!   the Gaussian limit functionals of both estimators.
//! - [`montecarlo`]: replicated experiments and a Kolmogorov–Smirnov
//!   normality check.
//!
//! [`cli`] wraps these as the `censtail` command.
//!
//! ```
//! use censtail::estimators::{asymptotic_ci, SortedSample, VarianceForm};
//! use censtail::models::{CensoringSetup, TailModel};
//!
//! let setup = CensoringSetup::new(TailModel::frechet(0.6)?, TailModel::frechet(0.9)?);
//! let sample = setup.sample(30_000, 7)?;
//! let fit = asymptotic_ci(&SortedSample::from(&sample), 500, 0.05, VarianceForm::default())?;
//! assert!((fit.gamma1_hat - 0.6).abs() < 0.2);
//! # Ok::<(), censtail::Error>(())
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod estimators;
pub mod gausslimit;
pub mod models;
pub mod montecarlo;
pub mod normal;
pub mod quadrature;
pub mod rng;

pub use error::{Error, EstimationError, Result};
