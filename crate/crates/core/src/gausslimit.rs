//! Brownian bridges sampled exactly at a finite point set, and the Gaussian
//! limit functionals of the adapted Hill and premium estimators.
//!
//! For a Brownian bridge `B` and the model constants `θ`, `p`, `q = 1 − p`:
//!
//! ```text
//! 𝔹(s)  = B(θ) − B(θ − ps)
//! 𝔹̃(s)  = −B(1 − qs)
//! 𝔹*(s) = 𝔹(s) + 𝔹̃(s)
//! ```
//!
//! With `t0` standing in for `k/n`, the limit of `√k(γ̂₁ − γ₁)` is
//!
//! ```text
//! Ψ = γ₁ t0^(−1/2) ∫₀¹ s⁻¹ 𝔹*(t0 s) ds − (γ₁/p) t0^(−1/2) 𝔹(t0)
//! ```
//!
//! and the limit of `√k(Π̂ − Π)/(h F̄(h))` is
//!
//! ```text
//! Φ = −pγ₁²/(1−γ₁) t0^(−1/2) 𝔹*(t0)
//!     + γ₁/(1−γ₁)² { t0^(−1/2) ∫₀¹ s⁻¹ 𝔹*(t0 s) ds − p⁻¹ t0^(−1/2) 𝔹(t0) }.
//! ```
//!
//! The integral uses `s = u²` and the midpoint rule in `u`:
//! `∫₀¹ s⁻¹ f(s) ds = ∫₀¹ 2u⁻¹ f(u²) du`. Since `𝔹*(t0 s)` is of order `√s`
//! near 0 the substituted integrand stays bounded. Every node is mapped to
//! the bridge arguments it needs and the bridge is sampled exactly there.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{premium_variance, tail_index_variance, VarianceForm};
use crate::rng::CounterRng;

pub const DEFAULT_T0: f64 = 0.005;
pub const DEFAULT_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitParams {
    pub gamma1: f64,
    pub p: f64,
    pub theta: f64,
    pub t0: f64,
    pub grid_size: usize,
}

impl LimitParams {
    pub fn new(gamma1: f64, p: f64, theta: f64, t0: f64, grid_size: usize) -> Result<Self> {
        if !(gamma1 > 0.0 && gamma1.is_finite()) {
            return Err(Error::domain(format!("gamma1 must be positive, got {gamma1}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain(format!("p must lie in (0,1], got {p}")));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::domain(format!("theta must lie in (0,1), got {theta}")));
        }
        if !(t0 > 0.0 && t0 < 1.0) {
            return Err(Error::domain(format!("t0 must lie in (0,1), got {t0}")));
        }
        if grid_size == 0 {
            return Err(Error::domain("grid_size must be at least 1"));
        }
        if !(p * t0 < theta) {
            return Err(Error::domain(format!("p*t0 = {} must be below theta = {theta}", p * t0)));
        }
        if !((1.0 - p) * t0 < 1.0) {
            return Err(Error::domain("q*t0 must be below 1"));
        }
        Ok(Self {
            gamma1,
            p,
            theta,
            t0,
            grid_size,
        })
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// Quadrature nodes `sⱼ = uⱼ²` and weights `2/(N uⱼ)`, `uⱼ = (j + ½)/N`.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.grid_size as f64;
        (0..self.grid_size).map(move |j| {
            let u = (j as f64 + 0.5) / n;
            (u * u, 2.0 / (n * u))
        })
    }

    /// Every bridge argument needed to evaluate both functionals, sorted and
    /// deduplicated. Arguments equal to 0 or 1 are bridge endpoints and are
    /// left out.
    pub fn required_points(&self) -> Vec<f64> {
        let mut pts = vec![self.theta];
        let args = self
            .nodes()
            .map(|(s, _)| self.t0 * s)
            .chain(std::iter::once(self.t0));
        for x in args {
            pts.push(self.theta - self.p * x);
            pts.push(1.0 - self.q() * x);
        }
        pts.retain(|&t| t > 0.0 && t < 1.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Asymptotic variance of `Ψ` (`t0 → 0`, fine grid).
    pub fn gamma_target_var(&self, form: VarianceForm) -> f64 {
        tail_index_variance(self.gamma1, self.p, form)
    }

    /// Asymptotic variance of `Φ`; `None` when `γ₁ ≥ 1`.
    pub fn premium_target_var(&self, form: VarianceForm) -> Option<f64> {
        (self.gamma1 < 1.0).then(|| premium_variance(self.gamma1, self.p, form))
    }
}

/// A Brownian bridge observed at a strictly increasing set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgePath {
    points: Vec<f64>,
    values: Vec<f64>,
}

impl BridgePath {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `B(t)`; `t` must be registered, or be one of the endpoints 0 and 1.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if t == 0.0 || t == 1.0 {
            return Ok(0.0);
        }
        self.points
            .binary_search_by(|p| p.total_cmp(&t))
            .map(|i| self.values[i])
            .map_err(|_| Error::domain(format!("bridge point {t} was not registered")))
    }

    /// Pointwise sum of two paths on the same point set.
    pub fn combine(&self, other: &BridgePath) -> Result<BridgePath> {
        if self.points != other.points {
            return Err(Error::domain("paths are registered on different point sets"));
        }
        Ok(BridgePath {
            points: self.points.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Exact joint sample of a Brownian bridge at `points`.
///
/// A Wiener path is built from independent Gaussian increments over the
/// points and 1, then `B(t) = W(t) − t W(1)`.
pub fn simulate_bridge(points: &[f64], seed: u64) -> Result<BridgePath> {
    if points.is_empty() {
        return Err(Error::domain("at least one bridge point is required"));
    }
    if points.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::domain("bridge points must lie in (0,1)"));
    }
    if points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("bridge points must be strictly increasing"));
    }
    let mut rng = CounterRng::new(seed);
    let mut normal = || -> f64 { StandardNormal.sample(rng.inner_mut()) };
    let mut w = Vec::with_capacity(points.len());
    let mut prev_t = 0.0;
    let mut prev_w = 0.0;
    for &t in points {
        prev_w += (t - prev_t).sqrt() * normal();
        prev_t = t;
        w.push(prev_w);
    }
    let w1 = prev_w + (1.0 - prev_t).sqrt() * normal();
    let values = points.iter().zip(&w).map(|(&t, &wt)| wt - t * w1).collect();
    Ok(BridgePath {
        points: points.to_vec(),
        values,
    })
}

/// `𝔹(s)`, `𝔹̃(s)` and `𝔹*(s)` at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcessValues {
    pub b: f64,
    pub b_tilde: f64,
    pub b_star: f64,
}

pub fn process_values(path: &BridgePath, params: &LimitParams, s: f64) -> Result<ProcessValues> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::domain(format!("process argument must lie in (0,1], got {s}")));
    }
    let b = path.value_at(params.theta)? - path.value_at(params.theta - params.p * s)?;
    let b_tilde = -path.value_at(1.0 - params.q() * s)?;
    Ok(ProcessValues {
        b,
        b_tilde,
        b_star: b + b_tilde,
    })
}

/// `t0^(−1/2) ∫₀¹ s⁻¹ 𝔹*(t0 s) ds` by the substituted midpoint rule.
pub fn integral_term(path: &BridgePath, params: &LimitParams) -> Result<f64> {
    let mut acc = 0.0;
    for (s, w) in params.nodes() {
        acc += w * process_values(path, params, params.t0 * s)?.b_star;
    }
    Ok(acc / params.t0.sqrt())
}

/// Both limit functionals on one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValues {
    pub gamma: f64,
    /// `None` when `γ₁ ≥ 1`.
    pub premium: Option<f64>,
}

pub fn functionals(path: &BridgePath, params: &LimitParams) -> Result<FunctionalValues> {
    let g1 = params.gamma1;
    let root = params.t0.sqrt();
    let integral = integral_term(path, params)?;
    let at_t0 = process_values(path, params, params.t0)?;
    let b_scaled = at_t0.b / root;
    let gamma = g1 * integral - g1 / params.p * b_scaled;
    let premium = (g1 < 1.0).then(|| {
        let c = 1.0 - g1;
        -params.p * g1 * g1 / c * at_t0.b_star / root
            + g1 / (c * c) * (integral - b_scaled / params.p)
    });
    Ok(FunctionalValues { gamma, premium })
}

/// `Ψ`, the limit of `√k(γ̂₁ − γ₁)`.
pub fn functional_gamma(path: &BridgePath, params: &LimitParams) -> Result<f64> {
    Ok(functionals(path, params)?.gamma)
}

/// `Φ`, the limit of `√k(Π̂ − Π)/(h F̄(h))`. Requires `γ₁ < 1`.
pub fn functional_premium(path: &BridgePath, params: &LimitParams) -> Result<f64> {
    if params.gamma1 >= 1.0 {
        return Err(Error::domain(format!(
            "premium functional needs gamma1 < 1, got {}",
            params.gamma1
        )));
    }
    Ok(functionals(path, params)?
        .premium
        .expect("gamma1 < 1 yields a premium value"))
}

/// Exact variances of the discretized `Ψ` and `Φ` at the given `t0` and
/// grid, from the bridge covariance `min(a, b) − ab`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelVariances {
    pub gamma: f64,
    pub premium: Option<f64>,
}

pub fn kernel_variances(params: &LimitParams) -> KernelVariances {
    let points = params.required_points();
    let g1 = params.gamma1;
    let root = params.t0.sqrt();

    let mut psi = LinearForm::new(&points);
    for (s, w) in params.nodes() {
        psi.add_b_star(params, params.t0 * s, g1 * w / root);
    }
    psi.add_b(params, params.t0, -g1 / params.p / root);

    let premium = (g1 < 1.0).then(|| {
        let c = 1.0 - g1;
        let mut phi = LinearForm::new(&points);
        phi.add_b_star(params, params.t0, -params.p * g1 * g1 / c / root);
        for (s, w) in params.nodes() {
            phi.add_b_star(params, params.t0 * s, g1 / (c * c) * w / root);
        }
        phi.add_b(params, params.t0, -g1 / (c * c) / params.p / root);
        phi.variance()
    });
    KernelVariances {
        gamma: psi.variance(),
        premium,
    }
}

/// `Σ cᵢ B(tᵢ)` over a sorted point set.
struct LinearForm<'a> {
    points: &'a [f64],
    coeffs: Vec<f64>,
}

impl<'a> LinearForm<'a> {
    fn new(points: &'a [f64]) -> Self {
        Self {
            points,
            coeffs: vec![0.0; points.len()],
        }
    }

    fn add(&mut self, t: f64, v: f64) {
        // Endpoints carry B = 0.
        if let Ok(i) = self.points.binary_search_by(|p| p.total_cmp(&t)) {
            self.coeffs[i] += v;
        }
    }

    fn add_b(&mut self, params: &LimitParams, x: f64, v: f64) {
        self.add(params.theta, v);
        self.add(params.theta - params.p * x, -v);
    }

    fn add_b_star(&mut self, params: &LimitParams, x: f64, v: f64) {
        self.add_b(params, x, v);
        self.add(1.0 - params.q() * x, -v);
    }

    /// `Σᵢ Σⱼ cᵢ cⱼ (min(tᵢ, tⱼ) − tᵢ tⱼ)` in one pass: for `i < j` the
    /// kernel is `tᵢ (1 − tⱼ)`.
    fn variance(&self) -> f64 {
        let mut prefix = 0.0;
        let mut total = 0.0;
        for (&t, &c) in self.points.iter().zip(&self.coeffs) {
            total += c * c * t * (1.0 - t) + 2.0 * c * (1.0 - t) * prefix;
            prefix += c * t;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_key;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    fn cov_and_se(a: &[f64], b: &[f64]) -> (f64, f64) {
        let n = a.len() as f64;
        let (ma, _) = mean_var(a);
        let (mb, _) = mean_var(b);
        let prods: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
        let (c, v) = mean_var(&prods);
        (c, (v / n).sqrt())
    }

    #[test]
    fn bridge_moments() {
        let pts = [0.3, 0.5, 0.7];
        let reps = 100_000;
        let mut cols: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(reps)).collect();
        for r in 0..reps {
            let path = simulate_bridge(&pts, derive_key(5, r as u64)).unwrap();
            for (c, v) in cols.iter_mut().zip(path.values()) {
                c.push(*v);
            }
        }
        let (m, v) = mean_var(&cols[1]);
        assert!(m.abs() < 3.0 * (0.25f64 / reps as f64).sqrt());
        // Var of the sample variance of a normal: 2σ⁴/(n−1).
        assert!((v - 0.25).abs() < 3.0 * 0.25 * (2.0 / reps as f64).sqrt());
        let (c, se) = cov_and_se(&cols[0], &cols[2]);
        assert!((c - 0.09).abs() < 3.0 * se, "{c} ± {se}");
        for (col, &t) in cols.iter().zip(&pts) {
            let (_, v) = mean_var(col);
            let target = t * (1.0 - t);
            assert!((v - target).abs() < 3.0 * target * (2.0 / reps as f64).sqrt());
        }
    }

    #[test]
    fn bridge_is_deterministic_and_validates() {
        let pts = [0.1, 0.2];
        assert_eq!(simulate_bridge(&pts, 1).unwrap(), simulate_bridge(&pts, 1).unwrap());
        assert_ne!(simulate_bridge(&pts, 1).unwrap(), simulate_bridge(&pts, 2).unwrap());
        assert!(simulate_bridge(&[0.2, 0.1], 1).is_err());
        assert!(simulate_bridge(&[0.2, 0.2], 1).is_err());
        assert!(simulate_bridge(&[0.0, 0.5], 1).is_err());
        assert!(simulate_bridge(&[0.5, 1.0], 1).is_err());
        assert!(simulate_bridge(&[], 1).is_err());
    }

    #[test]
    fn limit_params_validation() {
        assert!(LimitParams::new(0.6, 0.6, 0.6, 0.005, 512).is_ok());
        assert!(LimitParams::new(0.0, 0.6, 0.6, 0.005, 512).is_err());
        assert!(LimitParams::new(0.6, 0.0, 0.6, 0.005, 512).is_err());
        assert!(LimitParams::new(0.6, 1.2, 0.6, 0.005, 512).is_err());
        assert!(LimitParams::new(0.6, 0.6, 1.0, 0.005, 512).is_err());
        assert!(LimitParams::new(0.6, 0.9, 0.1, 0.5, 512).is_err());
        assert!(LimitParams::new(0.6, 0.6, 0.6, 0.005, 0).is_err());
    }

    #[test]
    fn process_values_need_registered_points() {
        let params = LimitParams::new(0.6, 0.5, 0.6, 0.005, 4).unwrap();
        let path = simulate_bridge(&[0.5], 3).unwrap();
        assert!(matches!(process_values(&path, &params, 0.3), Err(Error::Domain(_))));
        let path = simulate_bridge(&params.required_points(), 3).unwrap();
        assert!(functional_gamma(&path, &params).is_ok());
        assert!(process_values(&path, &params, 0.0).is_err());
    }

    #[test]
    fn processes_vanish_near_zero() {
        let params = LimitParams::new(0.6, 0.5, 0.6, 0.5, 4).unwrap();
        let s = 1e-12;
        let pts = [params.theta - params.p * s, params.theta, 1.0 - params.q() * s];
        let mut pts = pts.to_vec();
        pts.sort_by(f64::total_cmp);
        let path = simulate_bridge(&pts, 9).unwrap();
        let v = process_values(&path, &params, s).unwrap();
        assert!(v.b.abs() < 1e-4 && v.b_tilde.abs() < 1e-4 && v.b_star.abs() < 1e-4);
    }

    #[test]
    fn process_covariance_identities() {
        // θ = 0.6, p = 0.5 at (s, t) = (0.3, 0.7).
        let params = LimitParams::new(0.6, 0.5, 0.6, 0.7, 4).unwrap();
        let (s, t) = (0.3, 0.7);
        let mut pts = vec![];
        for x in [s, t] {
            pts.push(params.theta - params.p * x);
            pts.push(1.0 - params.q() * x);
        }
        pts.push(params.theta);
        pts.sort_by(f64::total_cmp);
        let reps = 100_000;
        let (mut bs, mut bt, mut ts, mut tt, mut ss, mut st) =
            (vec![], vec![], vec![], vec![], vec![], vec![]);
        for r in 0..reps {
            let path = simulate_bridge(&pts, derive_key(77, r)).unwrap();
            let a = process_values(&path, &params, s).unwrap();
            let b = process_values(&path, &params, t).unwrap();
            bs.push(a.b);
            bt.push(b.b);
            ts.push(a.b_tilde);
            tt.push(b.b_tilde);
            ss.push(a.b_star);
            st.push(b.b_star);
        }
        let p = params.p;
        let q = params.q();
        let (c, se) = cov_and_se(&bs, &bt);
        assert!((c - p * (0.3 - p * 0.21)).abs() < 3.0 * se, "B: {c} ± {se}");
        assert!((c - 0.0975).abs() < 3.0 * se);
        let (c, se) = cov_and_se(&ts, &tt);
        assert!((c - q * (0.3 - q * 0.21)).abs() < 3.0 * se, "B~: {c} ± {se}");
        let (c, se) = cov_and_se(&ss, &st);
        assert!((c - 0.09).abs() < 3.0 * se, "B*: {c} ± {se}");
        let (c, se) = cov_and_se(&bs, &st);
        assert!((c - p * 0.09).abs() < 3.0 * se, "B,B*: {c} ± {se}");
    }

    /// Variance of a linear form Σ cᵢ B(tᵢ) evaluated directly as a double sum.
    fn brute_force_var(coeffs: &[(f64, f64)]) -> f64 {
        let mut v = 0.0;
        for &(a, ca) in coeffs {
            for &(b, cb) in coeffs {
                v += ca * cb * (a.min(b) - a * b);
            }
        }
        v
    }

    #[test]
    fn kernel_variance_matches_brute_force_double_sum() {
        let params = LimitParams::new(0.6, 0.6, 0.55, 0.01, 16).unwrap();
        let root = params.t0.sqrt();
        let mut coeffs = vec![];
        for (s, w) in params.nodes() {
            let x = params.t0 * s;
            let c = params.gamma1 * w / root;
            coeffs.push((params.theta, c));
            coeffs.push((params.theta - params.p * x, -c));
            coeffs.push((1.0 - params.q() * x, -c));
        }
        let cb = -params.gamma1 / params.p / root;
        coeffs.push((params.theta, cb));
        coeffs.push((params.theta - params.p * params.t0, -cb));
        let exact = brute_force_var(&coeffs);
        let kv = kernel_variances(&params);
        assert!((kv.gamma / exact - 1.0).abs() < 1e-10, "{} vs {exact}", kv.gamma);
    }

    #[test]
    fn kernel_variances_approach_quotient_form() {
        let params = LimitParams::new(0.6, 0.6, 0.6, DEFAULT_T0, DEFAULT_GRID).unwrap();
        let kv = kernel_variances(&params);
        assert!((kv.gamma / 0.6 - 1.0).abs() < 0.01, "{}", kv.gamma);
        let params = LimitParams::new(0.5, 0.5, 0.6, DEFAULT_T0, DEFAULT_GRID).unwrap();
        let kv = kernel_variances(&params);
        assert!((kv.premium.unwrap() / 8.0625 - 1.0).abs() < 0.01);
        let params = LimitParams::new(0.5, 1.0, 0.6, DEFAULT_T0, DEFAULT_GRID).unwrap();
        let kv = kernel_variances(&params);
        assert!((kv.gamma / 0.25 - 1.0).abs() < 0.01);
        assert!((kv.premium.unwrap() / 4.25 - 1.0).abs() < 0.01);
    }

    #[test]
    fn doubling_the_grid_barely_moves_the_spread() {
        for (g1, p) in [(0.6, 0.6), (0.5, 0.5), (0.5, 1.0)] {
            let a = LimitParams::new(g1, p, 0.6, DEFAULT_T0, 512).unwrap();
            let b = LimitParams::new(g1, p, 0.6, DEFAULT_T0, 1024).unwrap();
            let (va, vb) = (kernel_variances(&a), kernel_variances(&b));
            assert!((va.gamma.sqrt() / vb.gamma.sqrt() - 1.0).abs() < 0.005);
            let (pa, pb) = (va.premium.unwrap(), vb.premium.unwrap());
            assert!((pa.sqrt() / pb.sqrt() - 1.0).abs() < 0.005);
        }
    }

    fn simulate_functionals(params: &LimitParams, reps: u64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let pts = params.required_points();
        let mut g = vec![];
        let mut pr = vec![];
        for r in 0..reps {
            let path = simulate_bridge(&pts, derive_key(seed, r)).unwrap();
            let f = functionals(&path, params).unwrap();
            g.push(f.gamma);
            if let Some(v) = f.premium {
                pr.push(v);
            }
        }
        (g, pr)
    }

    #[test]
    fn functional_variances_match_kernel() {
        let reps = 20_000;
        for (g1, p, seed) in [(0.6, 0.6, 1u64), (0.5, 0.5, 2), (0.5, 1.0, 3)] {
            let params = LimitParams::new(g1, p, 0.6, DEFAULT_T0, DEFAULT_GRID).unwrap();
            let kv = kernel_variances(&params);
            let (g, pr) = simulate_functionals(&params, reps, seed);
            let (m, v) = mean_var(&g);
            assert!(m.abs() < 3.0 * (kv.gamma / reps as f64).sqrt(), "mean {m}");
            assert!((v / kv.gamma - 1.0).abs() < 0.05, "gamma var {v} vs {}", kv.gamma);
            let (m, v) = mean_var(&pr);
            let target = kv.premium.unwrap();
            assert!(m.abs() < 3.0 * (target / reps as f64).sqrt());
            assert!((v / target - 1.0).abs() < 0.05, "premium var {v} vs {target}");
        }
    }

    #[test]
    fn complete_data_reduction() {
        // p = 1: Ψ has the complete-data Hill limit variance γ₁².
        let params = LimitParams::new(0.7, 1.0, 0.5, DEFAULT_T0, DEFAULT_GRID).unwrap();
        let (g, _) = simulate_functionals(&params, 20_000, 4);
        let (_, v) = mean_var(&g);
        assert!((v / 0.49 - 1.0).abs() < 0.10, "{v}");
    }

    #[test]
    fn functionals_are_linear_in_the_path() {
        let params = LimitParams::new(0.6, 0.6, 0.6, DEFAULT_T0, 64).unwrap();
        let pts = params.required_points();
        let a = simulate_bridge(&pts, 10).unwrap();
        let b = simulate_bridge(&pts, 11).unwrap();
        let sum = a.combine(&b).unwrap();
        let fa = functionals(&a, &params).unwrap();
        let fb = functionals(&b, &params).unwrap();
        let fs = functionals(&sum, &params).unwrap();
        let tol = 1e-12 * (1.0 + fa.gamma.abs() + fb.gamma.abs());
        assert!((fs.gamma - fa.gamma - fb.gamma).abs() < tol);
        let (pa, pb, ps) = (fa.premium.unwrap(), fb.premium.unwrap(), fs.premium.unwrap());
        assert!((ps - pa - pb).abs() < 1e-12 * (1.0 + pa.abs() + pb.abs()));
        let other = simulate_bridge(&pts[1..], 3).unwrap();
        assert!(a.combine(&other).is_err());
    }

    #[test]
    fn premium_functional_requires_finite_mean() {
        let params = LimitParams::new(1.2, 0.6, 0.6, DEFAULT_T0, 8).unwrap();
        let path = simulate_bridge(&params.required_points(), 1).unwrap();
        assert!(functional_premium(&path, &params).is_err());
        assert!(functional_gamma(&path, &params).is_ok());
        assert!(params.premium_target_var(VarianceForm::Quotient).is_none());
    }

    #[test]
    fn target_forms() {
        let params = LimitParams::new(0.6, 0.6, 0.6, DEFAULT_T0, 8).unwrap();
        assert!((params.gamma_target_var(VarianceForm::Product) - 0.216).abs() < 1e-15);
        assert!((params.gamma_target_var(VarianceForm::Quotient) - 0.6).abs() < 1e-15);
    }
}
