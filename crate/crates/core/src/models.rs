//! Heavy-tailed marginals, censored-pair sampling and the tail quantities of
//! the censoring model.
//!
//! With `X ~ F` (variable of interest) and an independent censoring variable
//! `Y ~ G`, one observes `Z = min(X, Y)` and `δ = 1{X ≤ Y}`. If the right tails
//! of `F` and `G` are regularly varying with indices `γ₁` and `γ₂`, then
//! `H̄ = F̄ Ḡ` is regularly varying with index
//!
//! ```text
//! γ = γ₁γ₂ / (γ₁ + γ₂),    p = γ/γ₁ = γ₂/(γ₁ + γ₂),    q = 1 − p.
//! ```
//!
//! `p` is the limiting fraction of uncensored observations far in the tail.
//!
//! # Families
//!
//! All three families have closed-form distribution and quantile functions
//! (scale `s > 0`, tail index `γ > 0`):
//!
//! | family  | `F̄(x)`                            | `F̄⁻¹(v)`                     |
//! |---------|-----------------------------------|------------------------------|
//! | Fréchet | `1 − exp(−(x/s)^(−1/γ))`          | `s (−ln(1 − v))^(−γ)`        |
//! | Pareto  | `(x/s)^(−1/γ)` for `x ≥ s`, else 1 | `s v^(−γ)`                   |
//! | Burr    | `(1 + (x/s)^(−ρ/γ))^(1/ρ)`, `ρ < 0` | `s (v^ρ − 1)^(−γ/ρ)`         |
//!
//! The Burr form is the usual EVT parameterization of the Burr XII law: its
//! second-order parameter is `ρ`, while Fréchet has second-order parameter
//! `−1` and Pareto is exactly a power law.
//!
//! Integrals against `dF` are evaluated on the survival scale `v = F̄(y)`,
//! e.g. `H̄¹(x) = ∫ₓ^∞ Ḡ dF = ∫₀^{F̄(x)} Ḡ(F̄⁻¹(v)) dv`, which maps the
//! infinite domain onto a bounded one without forming `1 − u` near `u = 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Frechet,
    Burr,
    Pareto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TailModelRepr", into = "TailModelRepr")]
pub struct TailModel {
    family: Family,
    gamma: f64,
    scale: f64,
    burr_rho: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct TailModelRepr {
    family: Family,
    gamma: f64,
    #[serde(default = "unit_scale")]
    scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    burr_rho: Option<f64>,
}

fn unit_scale() -> f64 {
    1.0
}

impl TryFrom<TailModelRepr> for TailModel {
    type Error = Error;

    fn try_from(r: TailModelRepr) -> Result<Self> {
        TailModel::new(r.family, r.gamma, r.scale, r.burr_rho)
    }
}

impl From<TailModel> for TailModelRepr {
    fn from(m: TailModel) -> Self {
        TailModelRepr {
            family: m.family,
            gamma: m.gamma,
            scale: m.scale,
            burr_rho: m.burr_rho,
        }
    }
}

impl TailModel {
    pub fn new(family: Family, gamma: f64, scale: f64, burr_rho: Option<f64>) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::domain(format!("gamma must be positive and finite, got {gamma}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!("scale must be positive and finite, got {scale}")));
        }
        let burr_rho = match (family, burr_rho) {
            (Family::Burr, Some(rho)) if rho < 0.0 && rho.is_finite() => Some(rho),
            (Family::Burr, Some(rho)) => {
                return Err(Error::domain(format!("burr_rho must be negative, got {rho}")))
            }
            (Family::Burr, None) => return Err(Error::domain("burr family requires burr_rho")),
            (_, Some(_)) => {
                return Err(Error::domain("burr_rho is only valid for the burr family"))
            }
            (_, None) => None,
        };
        Ok(Self {
            family,
            gamma,
            scale,
            burr_rho,
        })
    }

    pub fn frechet(gamma: f64) -> Result<Self> {
        Self::new(Family::Frechet, gamma, 1.0, None)
    }

    pub fn pareto(gamma: f64) -> Result<Self> {
        Self::new(Family::Pareto, gamma, 1.0, None)
    }

    pub fn burr(gamma: f64, rho: f64) -> Result<Self> {
        Self::new(Family::Burr, gamma, 1.0, Some(rho))
    }

    pub fn with_scale(self, scale: f64) -> Result<Self> {
        Self::new(self.family, self.gamma, scale, self.burr_rho)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn burr_rho(&self) -> Option<f64> {
        self.burr_rho
    }

    /// `F⁻¹(u)` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0,1), got {u}")));
        }
        let s = self.scale;
        let g = self.gamma;
        Ok(match self.family {
            Family::Frechet => s * (-u.ln()).powf(-g),
            Family::Pareto => s * (-g * (-u).ln_1p()).exp(),
            Family::Burr => {
                let rho = self.rho();
                s * (rho * (-u).ln_1p()).exp_m1().powf(-g / rho)
            }
        })
    }

    /// `F̄⁻¹(v)`, the level exceeded with probability `v ∈ (0, 1]`.
    pub fn tail_quantile(&self, v: f64) -> f64 {
        let s = self.scale;
        let g = self.gamma;
        match self.family {
            Family::Frechet => s * (-(-v).ln_1p()).powf(-g),
            Family::Pareto => s * v.powf(-g),
            Family::Burr => {
                let rho = self.rho();
                s * (rho * v.ln()).exp_m1().powf(-g / rho)
            }
        }
    }

    /// `F̄(x) = 1 − F(x)` for `x > 0`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain(format!("survival argument must be positive, got {x}")));
        }
        Ok(self.sf(x))
    }

    /// Unchecked `F̄`; returns 1 for `x ≤ 0`.
    pub(crate) fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let r = x / self.scale;
        match self.family {
            Family::Frechet => -(-r.powf(-1.0 / self.gamma)).exp_m1(),
            Family::Pareto => {
                if r <= 1.0 {
                    1.0
                } else {
                    r.powf(-1.0 / self.gamma)
                }
            }
            Family::Burr => {
                let rho = self.rho();
                (r.powf(-rho / self.gamma).ln_1p() / rho).exp()
            }
        }
    }

    /// Net excess-of-loss premium `Π(R) = E[(X − R)₊] = ∫_R^∞ F̄(x) dx`.
    ///
    /// Requires `γ < 1`. Evaluated as `∫₀^a (F̄⁻¹(v) − R) dv` with `a = F̄(R)`
    /// after `v = a·w^β`, `β = 1/(1−γ)`, which cancels the `v^(−γ)` endpoint
    /// behaviour of the quantile.
    pub fn excess_premium(&self, retention: f64) -> Result<f64> {
        if self.gamma >= 1.0 {
            return Err(Error::domain(format!(
                "excess premium is infinite for gamma = {} >= 1",
                self.gamma
            )));
        }
        if !(retention >= 0.0 && retention.is_finite()) {
            return Err(Error::domain(format!("retention must be finite and >= 0, got {retention}")));
        }
        let a = self.sf(retention);
        if a == 0.0 {
            return Ok(0.0);
        }
        let beta = 1.0 / (1.0 - self.gamma);
        let integrand = |w: f64| {
            let v = a * w.powf(beta);
            let excess = (self.tail_quantile(v) - retention).max(0.0);
            excess * a * beta * w.powf(beta - 1.0)
        };
        let scale = retention.max(self.scale) * a;
        let tol = Tolerance {
            abs: 1e-13 * scale,
            rel: 1e-11,
            ..Tolerance::default()
        };
        Ok(quadrature::integrate(integrand, 0.0, 1.0, tol)?.value)
    }

    fn rho(&self) -> f64 {
        self.burr_rho.expect("burr model always carries rho")
    }
}

/// Tail parameters of the censoring model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub gamma_z: f64,
    pub p: f64,
    pub q: f64,
}

/// The pair (F, G) of the variable of interest and the censoring variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensoringSetup {
    pub model_x: TailModel,
    pub model_y: TailModel,
}

impl CensoringSetup {
    pub fn new(model_x: TailModel, model_y: TailModel) -> Self {
        Self { model_x, model_y }
    }

    pub fn derived_params(&self) -> DerivedParams {
        let g1 = self.model_x.gamma;
        let g2 = self.model_y.gamma;
        let gamma_z = g1 * g2 / (g1 + g2);
        let p = gamma_z / g1;
        DerivedParams {
            gamma_z,
            p,
            q: 1.0 - p,
        }
    }

    /// `θ = H¹(∞) = P(X ≤ Y) = ∫₀¹ Ḡ(F̄⁻¹(v)) dv`, absolute error ≤ 1e-8.
    pub fn theta(&self) -> Result<f64> {
        let tol = Tolerance {
            abs: 1e-11,
            rel: 1e-12,
            ..Tolerance::default()
        };
        let r = quadrature::integrate(|v| self.uncensored_density_v(v), 0.0, 1.0, tol)?;
        if r.error_bound > 1e-8 {
            return Err(Error::Numeric {
                what: "theta quadrature".into(),
                estimate: r.value,
                error_bound: r.error_bound,
                evaluations: r.evaluations,
            });
        }
        Ok(r.value)
    }

    /// `H̄(x) = F̄(x) Ḡ(x)`.
    pub fn h_survival(&self, x: f64) -> f64 {
        self.model_x.sf(x) * self.model_y.sf(x)
    }

    /// `H⁻¹(1 − t)`: the level `x` with `H̄(x) = t`.
    ///
    /// Bisection on `ln x` inside `[min(F̄⁻¹(√t), Ḡ⁻¹(√t)), min(F̄⁻¹(t), Ḡ⁻¹(t))]`;
    /// `H̄ ≥ t` at the left end and `H̄ ≤ t` at the right end.
    pub fn h_quantile(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::domain(format!("tail probability must lie in (0,1), got {t}")));
        }
        let mx = &self.model_x;
        let my = &self.model_y;
        let mut lo = mx.tail_quantile(t.sqrt()).min(my.tail_quantile(t.sqrt())).ln();
        let mut hi = mx.tail_quantile(t).min(my.tail_quantile(t)).ln();
        let target = t.ln();
        let log_h = |lx: f64| {
            let x = lx.exp();
            mx.sf(x).ln() + my.sf(x).ln()
        };
        for _ in 0..400 {
            if hi - lo <= 1e-12 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if log_h(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if hi - lo > 1e-10 {
            return Err(Error::Numeric {
                what: "h_quantile bisection did not converge".into(),
                estimate: (0.5 * (lo + hi)).exp(),
                error_bound: hi - lo,
                evaluations: 400,
            });
        }
        Ok((0.5 * (lo + hi)).exp())
    }

    /// `H̄¹(x) = P(Z > x, δ = 1) = ∫ₓ^∞ Ḡ dF`.
    pub fn subdist_survival(&self, x: f64) -> Result<f64> {
        let a = self.model_x.sf(x);
        if a == 0.0 {
            return Ok(0.0);
        }
        let tol = Tolerance {
            abs: 1e-14 * a,
            rel: 1e-12,
            ..Tolerance::default()
        };
        Ok(quadrature::integrate(|v| self.uncensored_density_v(v), 0.0, a, tol)?.value)
    }

    /// `(1/t) H̄¹(z H⁻¹(1 − t))`, which tends to `p z^(−1/γ)` as `t ↓ 0`.
    pub fn subdist_ratio(&self, z: f64, t: f64) -> Result<f64> {
        if !(z >= 1.0 && z.is_finite()) {
            return Err(Error::domain(format!("z must be >= 1, got {z}")));
        }
        let h = self.h_quantile(t)?;
        Ok(self.subdist_survival(z * h)? / t)
    }

    /// Limit of [`Self::subdist_ratio`]: `p z^(−1/γ)`.
    pub fn subdist_ratio_limit(&self, z: f64) -> f64 {
        let d = self.derived_params();
        d.p * z.powf(-1.0 / d.gamma_z)
    }

    /// `n` censored pairs. Draw `i` uses uniforms `2i, 2i+1` of the stream
    /// keyed by `seed`: `X = F̄⁻¹(U₁)`, `Y = Ḡ⁻¹(U₂)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<CensoredSample> {
        if n == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        const CHUNK: usize = 4096;
        let mut z = vec![0.0; n];
        let mut delta = vec![false; n];
        z.par_chunks_mut(CHUNK)
            .zip(delta.par_chunks_mut(CHUNK))
            .enumerate()
            .for_each(|(c, (zc, dc))| {
                let mut rng = CounterRng::new(seed);
                rng.seek((c * CHUNK) as u64, 2);
                for (zi, di) in zc.iter_mut().zip(dc.iter_mut()) {
                    let x = self.model_x.tail_quantile(rng.open01());
                    let y = self.model_y.tail_quantile(rng.open01());
                    *zi = x.min(y);
                    *di = x <= y;
                }
            });
        CensoredSample::new(z, delta)
    }

    fn uncensored_density_v(&self, v: f64) -> f64 {
        self.model_y.sf(self.model_x.tail_quantile(v))
    }
}

/// Observed pairs `(Zᵢ, δᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CensoredSample {
    z: Vec<f64>,
    delta: Vec<bool>,
}

impl CensoredSample {
    pub fn new(z: Vec<f64>, delta: Vec<bool>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::domain("sample must contain at least one observation"));
        }
        if z.len() != delta.len() {
            return Err(Error::domain(format!(
                "z has {} entries but delta has {}",
                z.len(),
                delta.len()
            )));
        }
        if let Some(i) = z.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::domain(format!(
                "observation {i} is not a positive finite number: {}",
                z[i]
            )));
        }
        Ok(Self { z, delta })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn delta(&self) -> &[bool] {
        &self.delta
    }

    pub fn uncensored_fraction(&self) -> f64 {
        self.delta.iter().filter(|&&d| d).count() as f64 / self.len() as f64
    }
}
