//! The SARIMA-GARCH(1,1) model: sparse multiplicative lag polynomials for the
//! mean, the GARCH variance recursion, the joint log-likelihood and path
//! simulation.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::innovations::{InnovationDist, InnovationFamily};

/// Model orders: sparse nonseasonal and seasonal lag sets, integer
/// differencing and the innovation family. GARCH orders are fixed at (1,1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(default)]
    pub ar_lags: BTreeSet<usize>,
    #[serde(default)]
    pub ma_lags: BTreeSet<usize>,
    #[serde(default)]
    pub sar_lags: BTreeSet<usize>,
    #[serde(default)]
    pub sma_lags: BTreeSet<usize>,
    pub season: usize,
    #[serde(default)]
    pub d: usize,
    #[serde(default = "one")]
    pub garch_p: usize,
    #[serde(default = "one")]
    pub garch_q: usize,
    pub innovation: InnovationFamily,
}

fn one() -> usize {
    1
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.season == 0 {
            return Err(Error::InvalidSpec("season must be positive".into()));
        }
        if self.d > 1 {
            return Err(Error::InvalidSpec(format!(
                "d must be 0 or 1, got {}",
                self.d
            )));
        }
        if self.garch_p != 1 || self.garch_q != 1 {
            return Err(Error::InvalidSpec(format!(
                "only GARCH(1,1) is supported, got ({},{})",
                self.garch_p, self.garch_q
            )));
        }
        for lags in [&self.ar_lags, &self.ma_lags, &self.sar_lags, &self.sma_lags] {
            if lags.contains(&0) {
                return Err(Error::InvalidSpec("lag 0 is not a lag".into()));
            }
        }
        for &lag in self.sar_lags.iter().chain(&self.sma_lags) {
            if lag % self.season != 0 {
                return Err(Error::InvalidSpec(format!(
                    "seasonal lag {lag} is not a multiple of season {}",
                    self.season
                )));
            }
        }
        Ok(())
    }

    /// Number of free parameters under this spec: constant, the lag
    /// coefficients, the three GARCH parameters and the distribution shape
    /// when the family has one.
    pub fn free_params(&self) -> usize {
        let shape = match self.innovation {
            InnovationFamily::Normal => 0,
            InnovationFamily::SkewNormal | InnovationFamily::StudentT => 1,
        };
        1 + self.ar_lags.len()
            + self.ma_lags.len()
            + self.sar_lags.len()
            + self.sma_lags.len()
            + 3
            + shape
    }

    /// Largest lag of the expanded (multiplicative) polynomials.
    pub fn max_combined_lag(&self) -> usize {
        let max = |a: &BTreeSet<usize>| a.iter().max().copied().unwrap_or(0);
        let ar = max(&self.ar_lags) + max(&self.sar_lags);
        let ma = max(&self.ma_lags) + max(&self.sma_lags);
        ar.max(ma)
    }
}

/// Parameter values for a [`ModelSpec`]. Lag maps are keyed by lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub constant: f64,
    #[serde(default)]
    pub ar: BTreeMap<usize, f64>,
    #[serde(default)]
    pub ma: BTreeMap<usize, f64>,
    #[serde(default)]
    pub sar: BTreeMap<usize, f64>,
    #[serde(default)]
    pub sma: BTreeMap<usize, f64>,
    pub garch_omega: f64,
    pub garch_alpha: f64,
    pub garch_beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_shape: Option<f64>,
}

impl ModelParams {
    /// GARCH positivity and covariance-stationarity constraints.
    pub fn validate_garch(&self) -> Result<()> {
        if !(self.garch_omega > 0.0) {
            return Err(Error::InvalidParams(format!(
                "garch_omega must be positive, got {}",
                self.garch_omega
            )));
        }
        if self.garch_alpha < 0.0 || self.garch_beta < 0.0 {
            return Err(Error::InvalidParams(
                "garch_alpha and garch_beta must be non-negative".into(),
            ));
        }
        if self.garch_alpha + self.garch_beta >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "alpha + beta = {} violates covariance stationarity",
                self.garch_alpha + self.garch_beta
            )));
        }
        Ok(())
    }

    /// Full validation: GARCH constraints plus a numeric root check on the
    /// expanded AR polynomial.
    pub fn validate(&self, spec: &ModelSpec) -> Result<()> {
        spec.validate()?;
        self.validate_garch()?;
        for (map, lags, name) in [
            (&self.ar, &spec.ar_lags, "ar"),
            (&self.ma, &spec.ma_lags, "ma"),
            (&self.sar, &spec.sar_lags, "sar"),
            (&self.sma, &spec.sma_lags, "sma"),
        ] {
            let keys: BTreeSet<usize> = map.keys().copied().collect();
            if &keys != lags {
                return Err(Error::InvalidParams(format!(
                    "{name} coefficients {keys:?} do not match spec lags {lags:?}"
                )));
            }
        }
        if !ar_roots_outside_unit_circle(&combined_ar(self)) {
            return Err(Error::NonStationary);
        }
        Ok(())
    }

    pub fn long_run_variance(&self) -> f64 {
        self.garch_omega / (1.0 - self.garch_alpha - self.garch_beta)
    }

    pub fn innovation_dist(&self, family: InnovationFamily) -> Result<InnovationDist> {
        InnovationDist::from_family(family, self.dist_shape)
    }
}

/// Expanded AR coefficients pi_k of (1 - sum phi L^i)(1 - sum Phi L^j)
/// written as 1 - sum pi_k L^k. Cross terms get a minus sign.
pub fn combined_ar(params: &ModelParams) -> BTreeMap<usize, f64> {
    let mut out: BTreeMap<usize, f64> = BTreeMap::new();
    for (&i, &phi) in &params.ar {
        *out.entry(i).or_insert(0.0) += phi;
    }
    for (&j, &sphi) in &params.sar {
        *out.entry(j).or_insert(0.0) += sphi;
    }
    for (&i, &phi) in &params.ar {
        for (&j, &sphi) in &params.sar {
            *out.entry(i + j).or_insert(0.0) -= phi * sphi;
        }
    }
    out.retain(|_, v| *v != 0.0);
    out
}

/// Expanded MA coefficients psi_k of (1 + sum theta L^i)(1 + sum Theta L^j)
/// written as 1 + sum psi_k L^k.
pub fn combined_ma(params: &ModelParams) -> BTreeMap<usize, f64> {
    let mut out: BTreeMap<usize, f64> = BTreeMap::new();
    for (&i, &theta) in &params.ma {
        *out.entry(i).or_insert(0.0) += theta;
    }
    for (&j, &stheta) in &params.sma {
        *out.entry(j).or_insert(0.0) += stheta;
    }
    for (&i, &theta) in &params.ma {
        for (&j, &stheta) in &params.sma {
            *out.entry(i + j).or_insert(0.0) += theta * stheta;
        }
    }
    out.retain(|_, v| *v != 0.0);
    out
}

/// Checks that every root of 1 - sum pi_k z^k lies outside the unit circle,
/// via Durand-Kerner on the reversed polynomial.
pub fn ar_roots_outside_unit_circle(pi: &BTreeMap<usize, f64>) -> bool {
    let degree = match pi.keys().max() {
        Some(&d) => d,
        None => return true,
    };
    // p(z) = 1 - sum pi_k z^k; coefficients c[0..=degree], c[0] = 1.
    let mut coeffs = vec![0.0f64; degree + 1];
    coeffs[0] = 1.0;
    for (&k, &v) in pi {
        coeffs[k] = -v;
    }
    // Roots of p are outside the unit circle iff roots of the reversed
    // polynomial q(z) = z^deg * p(1/z) are strictly inside.
    let rev: Vec<f64> = coeffs.iter().rev().copied().collect();
    durand_kerner(&rev).iter().all(|&(re, im)| re * re + im * im < 1.0 - 1e-9)
}

/// All complex roots of a real polynomial c[0] + c[1] z + ... + c[n] z^n.
fn durand_kerner(c: &[f64]) -> Vec<(f64, f64)> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let eval = |re: f64, im: f64| -> (f64, f64) {
        let mut pr = 0.0;
        let mut pi = 0.0;
        for &coef in monic.iter().rev() {
            let nr = pr * re - pi * im + coef;
            let ni = pr * im + pi * re;
            pr = nr;
            pi = ni;
        }
        (pr, pi)
    };
    // initial guesses on a spiral of radius ~ coefficient bound
    let bound = 1.0 + monic[..n].iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut roots: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            (0.7 * bound * angle.cos(), 0.7 * bound * angle.sin())
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (pr, pi_) = eval(roots[i].0, roots[i].1);
            let mut dr = 1.0;
            let mut di = 0.0;
            for j in 0..n {
                if j != i {
                    let ar = roots[i].0 - roots[j].0;
                    let ai = roots[i].1 - roots[j].1;
                    let nr = dr * ar - di * ai;
                    let ni = dr * ai + di * ar;
                    dr = nr;
                    di = ni;
                }
            }
            let denom = dr * dr + di * di;
            if denom < 1e-300 {
                continue;
            }
            let sr = (pr * dr + pi_ * di) / denom;
            let si = (pi_ * dr - pr * di) / denom;
            roots[i].0 -= sr;
            roots[i].1 -= si;
            max_step = max_step.max(sr.abs() + si.abs());
        }
        if max_step < 1e-12 {
            break;
        }
    }
    roots
}

/// Filtered residuals, conditional variances and standardized residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutput {
    pub residuals: Vec<f64>,
    pub cond_variance: Vec<f64>,
    pub std_residuals: Vec<f64>,
}

/// Applies integer differencing d times.
pub fn difference(values: &[f64], d: usize) -> Vec<f64> {
    let mut y = values.to_vec();
    for _ in 0..d {
        y = y.windows(2).map(|w| w[1] - w[0]).collect();
    }
    y
}

fn mean_residuals_with_presample(
    pi: &BTreeMap<usize, f64>,
    psi: &BTreeMap<usize, f64>,
    constant: f64,
    y: &[f64],
    presample_y: f64,
) -> Vec<f64> {
    let mut a = Vec::with_capacity(y.len());
    for t in 0..y.len() {
        let mut value = y[t] - constant;
        for (&k, &coef) in pi {
            let yk = if t >= k { y[t - k] } else { presample_y };
            value -= coef * yk;
        }
        for (&k, &coef) in psi {
            let ak = if t >= k { a[t - k] } else { 0.0 };
            value -= coef * ak;
        }
        a.push(value);
    }
    a
}

/// ARMA residual recursion on the d-times differenced series. Presample
/// levels are the sample mean; presample shocks are zero.
pub fn mean_filter(spec: &ModelSpec, params: &ModelParams, returns: &[f64]) -> Result<Vec<f64>> {
    spec.validate()?;
    let max_lag = spec.max_combined_lag();
    if returns.len() <= max_lag {
        return Err(Error::SeriesTooShort {
            got: returns.len(),
            need: max_lag + 1,
        });
    }
    let y = difference(returns, spec.d);
    let pi = combined_ar(params);
    let psi = combined_ma(params);
    let presample_y = y.iter().sum::<f64>() / y.len() as f64;
    Ok(mean_residuals_with_presample(&pi, &psi, params.constant, &y, presample_y))
}

/// GARCH(1,1) recursion seeded at the unconditional variance.
pub fn variance_filter(params: &ModelParams, residuals: &[f64]) -> Result<Vec<f64>> {
    params.validate_garch()?;
    let (omega, alpha, beta) = (params.garch_omega, params.garch_alpha, params.garch_beta);
    let mut out = Vec::with_capacity(residuals.len());
    let mut sigma2 = params.long_run_variance();
    for t in 0..residuals.len() {
        if t > 0 {
            let a_prev = residuals[t - 1];
            sigma2 = omega + alpha * a_prev * a_prev + beta * sigma2;
        }
        out.push(sigma2);
    }
    Ok(out)
}

/// Runs both filters and standardizes the residuals.
pub fn filter(spec: &ModelSpec, params: &ModelParams, returns: &[f64]) -> Result<FilterOutput> {
    let residuals = mean_filter(spec, params, returns)?;
    let cond_variance = variance_filter(params, &residuals)?;
    let std_residuals = residuals
        .iter()
        .zip(&cond_variance)
        .map(|(a, s2)| a / s2.sqrt())
        .collect();
    Ok(FilterOutput {
        residuals,
        cond_variance,
        std_residuals,
    })
}

/// Conditional log-likelihood over post-burn-in observations; burn-in is the
/// maximum combined lag.
pub fn log_likelihood(spec: &ModelSpec, params: &ModelParams, returns: &[f64]) -> Result<f64> {
    let out = filter(spec, params, returns)?;
    let dist = params.innovation_dist(spec.innovation)?;
    let burn = spec.max_combined_lag();
    let mut ll = 0.0;
    for t in burn..out.residuals.len() {
        let s2 = out.cond_variance[t];
        ll += dist.log_density(out.std_residuals[t])? - 0.5 * s2.ln();
    }
    if !ll.is_finite() {
        return Err(Error::NonFiniteLikelihood);
    }
    Ok(ll)
}

/// Simulation output: the generated series and the shocks that drove it,
/// aligned index by index after the discarded burn-in.
#[derive(Debug, Clone)]
pub struct SimulatedPath {
    pub returns: Vec<f64>,
    pub shocks: Vec<f64>,
    pub cond_variance: Vec<f64>,
}

/// Generates a path from the model. Discards a burn-in of 10x the maximum
/// combined lag; deterministic for a fixed seed.
pub fn simulate(spec: &ModelSpec, params: &ModelParams, n: usize, seed: u64) -> Result<SimulatedPath> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_with(spec, params, n, &mut rng)
}

pub fn simulate_with<R: rand::Rng>(
    spec: &ModelSpec,
    params: &ModelParams,
    n: usize,
    rng: &mut R,
) -> Result<SimulatedPath> {
    spec.validate()?;
    params.validate_garch()?;
    let max_lag = spec.max_combined_lag();
    let burn = 10 * max_lag;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let dist = params.innovation_dist(spec.innovation)?;
    let pi = combined_ar(params);
    let psi = combined_ma(params);
    let (omega, alpha, beta) = (params.garch_omega, params.garch_alpha, params.garch_beta);
    let total = n + burn;
    // stationary mean of the ARMA part
    let pi_sum: f64 = pi.values().sum();
    let mu = params.constant / (1.0 - pi_sum);

    let mut shocks = Vec::with_capacity(total);
    let mut sigma2s = Vec::with_capacity(total);
    let mut y = Vec::with_capacity(total);
    let mut sigma2 = params.long_run_variance();
    for t in 0..total {
        if t > 0 {
            let a_prev = shocks[t - 1];
            sigma2 = omega + alpha * a_prev * a_prev + beta * sigma2;
        }
        let a_t = dist.draw(rng) * sigma2.sqrt();
        let mut value = params.constant + a_t;
        for (&k, &coef) in &pi {
            let yk = if t >= k { y[t - k] } else { mu };
            value += coef * yk;
        }
        for (&k, &coef) in &psi {
            let ak = if t >= k { shocks[t - k] } else { 0.0 };
            value += coef * ak;
        }
        shocks.push(a_t);
        sigma2s.push(sigma2);
        y.push(value);
    }
    let mut returns: Vec<f64> = y[burn..].to_vec();
    if spec.d == 1 {
        let mut acc = 0.0;
        for v in &mut returns {
            acc += *v;
            *v = acc;
        }
    }
    Ok(SimulatedPath {
        returns,
        shocks: shocks[burn..].to_vec(),
        cond_variance: sigma2s[burn..].to_vec(),
    })
}
