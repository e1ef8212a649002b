//! Multi-step forecasts: mean recursion with future shocks at zero, the
//! GARCH variance recursion toward its long-run level, psi-weight
//! accumulation for forecast-error variance, and reconstruction to levels
//! with prediction intervals.

use std::io::Write;

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::FittedModel;
use crate::model::{self, ModelParams, ModelSpec};

#[derive(Debug, Clone, Copy, Default)]
pub struct ForecastOptions {
    /// Adds the half-variance lognormal correction when reconstructing
    /// levels. Off by default: point forecasts are then median-style.
    pub level_correction: bool,
}

/// Per-horizon forecast of return mean, return variance and reconstructed
/// load level with interval bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub horizon: usize,
    pub return_mean: Vec<f64>,
    pub return_variance: Vec<f64>,
    pub level_point: Vec<f64>,
    pub level_lower: Vec<f64>,
    pub level_upper: Vec<f64>,
    pub origin_level: f64,
    pub coverage: f64,
}

impl ForecastResult {
    /// CSV rows `timestamp,level_point,level_lower,level_upper`, with
    /// timestamps extrapolated hourly from the last training timestamp.
    pub fn write_csv<W: Write>(&self, writer: W, last_train: NaiveDateTime) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["timestamp", "level_point", "level_lower", "level_upper"])
            .map_err(|e| Error::CsvParse { line: 1, msg: e.to_string() })?;
        for j in 0..self.horizon {
            let ts = last_train + Duration::hours((j + 1) as i64);
            w.write_record([
                ts.format("%m/%d/%Y %H:%M").to_string(),
                format!("{}", self.level_point[j]),
                format!("{}", self.level_lower[j]),
                format!("{}", self.level_upper[j]),
            ])
            .map_err(|e| Error::CsvParse { line: j + 2, msg: e.to_string() })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// First `n` coefficients of the MA(infinity) representation
/// theta(L)Theta(L^s) / [phi(L)Phi(L^s)]; psi_0 = 1.
pub fn psi_weights(spec: &ModelSpec, params: &ModelParams, n: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let pi = model::combined_ar(params);
    if !model::ar_roots_outside_unit_circle(&pi) {
        return Err(Error::NonStationary);
    }
    let ma = model::combined_ma(params);
    let mut psi = Vec::with_capacity(n);
    if n == 0 {
        return Ok(psi);
    }
    psi.push(1.0);
    for j in 1..n {
        let mut value = ma.get(&j).copied().unwrap_or(0.0);
        for (&k, &coef) in pi.range(1..=j) {
            value += coef * psi[j - k];
        }
        psi.push(value);
    }
    Ok(psi)
}

/// Forecasts `h` steps ahead from a fitted model.
pub fn forecast(
    model: &FittedModel,
    returns: &[f64],
    origin_level: f64,
    h: usize,
    coverage: f64,
) -> Result<ForecastResult> {
    forecast_with_options(
        model,
        returns,
        origin_level,
        h,
        coverage,
        &ForecastOptions::default(),
    )
}

pub fn forecast_with_options(
    model: &FittedModel,
    returns: &[f64],
    origin_level: f64,
    h: usize,
    coverage: f64,
    options: &ForecastOptions,
) -> Result<ForecastResult> {
    forecast_params(
        &model.spec,
        &model.params,
        returns,
        origin_level,
        h,
        coverage,
        options,
    )
}

/// Forecast from explicit spec and parameters.
#[allow(clippy::too_many_arguments)]
pub fn forecast_params(
    spec: &ModelSpec,
    params: &ModelParams,
    returns: &[f64],
    origin_level: f64,
    h: usize,
    coverage: f64,
    options: &ForecastOptions,
) -> Result<ForecastResult> {
    if h < 1 {
        return Err(Error::InvalidHorizon);
    }
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(Error::CoverageOutOfRange(coverage));
    }
    if !(origin_level > 0.0) {
        return Err(Error::NonPositiveLevel {
            index: 0,
            value: origin_level,
        });
    }
    let filter = model::filter(spec, params, returns)?;
    let y = model::difference(returns, spec.d);
    let pi = model::combined_ar(params);
    let ma = model::combined_ma(params);

    // Mean recursion with future shocks at their mean of zero.
    let t_end = y.len();
    let y_mean = y.iter().sum::<f64>() / t_end as f64;
    let mut y_ext = y.clone();
    let a_hist = &filter.residuals;
    let mut step_mean = Vec::with_capacity(h);
    for j in 1..=h {
        let t = t_end - 1 + j;
        let mut value = params.constant;
        for (&k, &coef) in &pi {
            let yk = if t >= k { y_ext[t - k] } else { y_mean };
            value += coef * yk;
        }
        // shocks after t_end - 1 are unknown and set to their mean of zero
        for (&k, &coef) in &ma {
            if t >= k && t - k < a_hist.len() {
                value += coef * a_hist[t - k];
            }
        }
        y_ext.push(value);
        step_mean.push(value);
    }
    // per-step return forecasts
    let return_mean: Vec<f64> = if spec.d == 0 {
        step_mean.clone()
    } else {
        let last_r = *returns.last().expect("non-empty checked by filter");
        step_mean
            .iter()
            .scan(last_r, |acc, &dy| {
                *acc += dy;
                Some(*acc)
            })
            .collect()
    };

    // GARCH variance forecasts: step one uses the realized state, later
    // steps follow the E[sigma^2] recursion toward the long-run level.
    let (omega, alpha, beta) = (params.garch_omega, params.garch_alpha, params.garch_beta);
    let a_last = *filter.residuals.last().unwrap();
    let s2_last = *filter.cond_variance.last().unwrap();
    let mut shock_var = Vec::with_capacity(h);
    let mut s2 = omega + alpha * a_last * a_last + beta * s2_last;
    shock_var.push(s2);
    for _ in 1..h {
        s2 = omega + (alpha + beta) * s2;
        shock_var.push(s2);
    }

    // psi weights of the return process (integrated when d = 1)
    let psi_raw = psi_weights(spec, params, h)?;
    let psi_r: Vec<f64> = if spec.d == 0 {
        psi_raw
    } else {
        psi_raw
            .iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    };
    let return_variance: Vec<f64> = (1..=h)
        .map(|j| (0..j).map(|i| psi_r[i] * psi_r[i] * shock_var[j - 1 - i]).sum())
        .collect();

    // cumulative psi weights give the variance of the j-step log-level error
    let cum_psi: Vec<f64> = psi_r
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let cum_var: Vec<f64> = (1..=h)
        .map(|j| (0..j).map(|m| cum_psi[m] * cum_psi[m] * shock_var[j - 1 - m]).sum())
        .collect();

    let dist = params.innovation_dist(spec.innovation)?;
    let tail = 0.5 * (1.0 - coverage);
    let q_lo = dist.quantile(tail)?;
    let q_hi = dist.quantile(1.0 - tail)?;

    let log_origin = origin_level.ln();
    let mut level_point = Vec::with_capacity(h);
    let mut level_lower = Vec::with_capacity(h);
    let mut level_upper = Vec::with_capacity(h);
    let mut cum_mean = log_origin;
    for j in 0..h {
        cum_mean += return_mean[j];
        let correction = if options.level_correction {
            0.5 * cum_var[j]
        } else {
            0.0
        };
        let sd = cum_var[j].sqrt();
        level_point.push((cum_mean + correction).exp());
        level_lower.push((cum_mean + correction + q_lo * sd).exp());
        level_upper.push((cum_mean + correction + q_hi * sd).exp());
    }

    Ok(ForecastResult {
        horizon: h,
        return_mean,
        return_variance,
        level_point,
        level_lower,
        level_upper,
        origin_level,
        coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::innovations::InnovationFamily;
    use crate::model::simulate;
    use approx::assert_relative_eq;
    use std::collections::{BTreeMap, BTreeSet};

    fn garch_spec() -> ModelSpec {
        ModelSpec {
            ar_lags: BTreeSet::new(),
            ma_lags: BTreeSet::new(),
            sar_lags: BTreeSet::new(),
            sma_lags: BTreeSet::new(),
            season: 24,
            d: 0,
            garch_p: 1,
            garch_q: 1,
            innovation: InnovationFamily::Normal,
        }
    }

    fn bare_params() -> ModelParams {
        ModelParams {
            constant: 0.0,
            ar: BTreeMap::new(),
            ma: BTreeMap::new(),
            sar: BTreeMap::new(),
            sma: BTreeMap::new(),
            garch_omega: 1.0,
            garch_alpha: 0.0,
            garch_beta: 0.0,
            dist_shape: None,
        }
    }

    #[test]
    fn psi_weights_pure_ma() {
        let spec = ModelSpec {
            ma_lags: [3].into(),
            ..garch_spec()
        };
        let mut params = bare_params();
        params.ma = [(3, 0.029)].into();
        let psi = psi_weights(&spec, &params, 6).unwrap();
        assert_eq!(psi, vec![1.0, 0.0, 0.0, 0.029, 0.0, 0.0]);
    }

    #[test]
    fn psi_weights_ar1_geometric() {
        let spec = ModelSpec {
            ar_lags: [1].into(),
            ..garch_spec()
        };
        let mut params = bare_params();
        params.ar = [(1, 0.5)].into();
        let psi = psi_weights(&spec, &params, 10).unwrap();
        for (j, &p) in psi.iter().enumerate() {
            assert_relative_eq!(p, 0.5f64.powi(j as i32), epsilon = 1e-12);
        }
    }

    #[test]
    fn psi_weights_reject_nonstationary() {
        let spec = ModelSpec {
            ar_lags: [1].into(),
            ..garch_spec()
        };
        let mut params = bare_params();
        params.ar = [(1, 1.05)].into();
        assert!(matches!(
            psi_weights(&spec, &params, 5),
            Err(Error::NonStationary)
        ));
    }

    #[test]
    fn constant_only_closed_form() {
        let spec = garch_spec();
        let mut params = bare_params();
        params.constant = 0.01;
        let returns = vec![0.01; 100];
        let fc =
            forecast_params(&spec, &params, &returns, 100.0, 5, 0.95, &Default::default())
                .unwrap();
        for j in 0..5 {
            assert_relative_eq!(fc.return_mean[j], 0.01, epsilon = 1e-12);
            assert_relative_eq!(
                fc.level_point[j],
                100.0 * (0.01 * (j + 1) as f64).exp(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn variance_converges_to_long_run_monotonically() {
        let spec = garch_spec();
        let mut params = bare_params();
        params.garch_omega = 0.370;
        params.garch_alpha = 0.562;
        params.garch_beta = 0.250;
        let path = simulate(&spec, &params, 500, 3).unwrap();
        let fc = forecast_params(
            &spec,
            &params,
            &path.returns,
            100.0,
            200,
            0.95,
            &Default::default(),
        )
        .unwrap();
        let lrv = 0.370 / (1.0 - 0.812);
        let start = fc.return_variance[0];
        for w in fc.return_variance.windows(2) {
            if start < lrv {
                assert!(w[1] >= w[0] - 1e-12);
            } else {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
        assert_relative_eq!(fc.return_variance[199], lrv, max_relative = 1e-3);
        assert_relative_eq!(lrv, 1.9681, epsilon = 1e-4);
    }

    #[test]
    fn interval_ordering_and_positivity() {
        let spec = ModelSpec {
            ar_lags: [2].into(),
            ma_lags: [3].into(),
            sar_lags: [24].into(),
            sma_lags: [24].into(),
            ..garch_spec()
        };
        let params = ModelParams {
            constant: 0.001,
            ar: [(2, 0.228)].into(),
            ma: [(3, 0.029)].into(),
            sar: [(24, 0.345)].into(),
            sma: [(24, -0.878)].into(),
            garch_omega: 0.0004,
            garch_alpha: 0.2,
            garch_beta: 0.5,
            dist_shape: None,
        };
        let path = simulate(&spec, &params, 1000, 11).unwrap();
        for correction in [false, true] {
            let fc = forecast_params(
                &spec,
                &params,
                &path.returns,
                75.8,
                24,
                0.95,
                &ForecastOptions {
                    level_correction: correction,
                },
            )
            .unwrap();
            for j in 0..24 {
                assert!(fc.level_point[j] > 0.0);
                assert!(fc.level_lower[j] < fc.level_point[j]);
                assert!(fc.level_point[j] < fc.level_upper[j]);
                assert!(fc.return_variance[j] > 0.0);
            }
        }
    }

    #[test]
    fn interval_width_nondecreasing_from_below_long_run() {
        let spec = garch_spec();
        let mut params = bare_params();
        params.garch_omega = 0.1;
        params.garch_alpha = 0.1;
        params.garch_beta = 0.5;
        // quiet recent history puts sigma^2 below its long-run level
        let returns = vec![0.001; 300];
        let fc = forecast_params(&spec, &params, &returns, 50.0, 24, 0.95, &Default::default())
            .unwrap();
        let widths: Vec<f64> = fc
            .level_upper
            .iter()
            .zip(&fc.level_lower)
            .map(|(u, l)| u / l)
            .collect();
        for w in widths.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn one_step_forecast_matches_mean_recursion() {
        let spec = ModelSpec {
            ar_lags: [1].into(),
            ma_lags: [2].into(),
            ..garch_spec()
        };
        let params = ModelParams {
            constant: 0.01,
            ar: [(1, 0.5)].into(),
            ma: [(2, 0.3)].into(),
            sar: BTreeMap::new(),
            sma: BTreeMap::new(),
            garch_omega: 0.2,
            garch_alpha: 0.1,
            garch_beta: 0.3,
            dist_shape: None,
        };
        let path = simulate(&spec, &params, 500, 5).unwrap();
        let returns = &path.returns;
        let fc = forecast_params(&spec, &params, returns, 100.0, 1, 0.95, &Default::default())
            .unwrap();
        let filter = crate::model::filter(&spec, &params, returns).unwrap();
        let n = returns.len();
        let expected = 0.01 + 0.5 * returns[n - 1] + 0.3 * filter.residuals[n - 2];
        assert_relative_eq!(fc.return_mean[0], expected, epsilon = 1e-12);
    }

    #[test]
    fn one_step_coverage() {
        let spec = garch_spec();
        let mut params = bare_params();
        params.garch_omega = 0.37;
        params.garch_alpha = 0.3;
        params.garch_beta = 0.4;
        let mut hits = 0usize;
        let trials = 10_000usize;
        for seed in 0..trials as u64 {
            let path = simulate(&spec, &params, 300, 40_000 + seed).unwrap();
            let history = &path.returns[..299];
            let realized_return = path.returns[299];
            let fc = forecast_params(
                &spec,
                &params,
                history,
                100.0,
                1,
                0.95,
                &Default::default(),
            )
            .unwrap();
            let realized_level = 100.0 * realized_return.exp();
            if realized_level >= fc.level_lower[0] && realized_level <= fc.level_upper[0] {
                hits += 1;
            }
        }
        let rate = hits as f64 / trials as f64;
        assert!((rate - 0.95).abs() < 0.03, "coverage {rate}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let spec = garch_spec();
        let params = bare_params();
        let returns = vec![0.01; 50];
        assert!(matches!(
            forecast_params(&spec, &params, &returns, 10.0, 0, 0.95, &Default::default()),
            Err(Error::InvalidHorizon)
        ));
        assert!(matches!(
            forecast_params(&spec, &params, &returns, 10.0, 5, 1.0, &Default::default()),
            Err(Error::CoverageOutOfRange(_))
        ));
        assert!(forecast_params(&spec, &params, &returns, -1.0, 5, 0.9, &Default::default())
            .is_err());
    }

    #[test]
    fn csv_output_shape() {
        let spec = garch_spec();
        let params = bare_params();
        let returns = vec![0.01; 50];
        let fc = forecast_params(&spec, &params, &returns, 70.0, 3, 0.95, &Default::default())
            .unwrap();
        let mut out = Vec::new();
        let start = chrono::NaiveDate::from_ymd_opt(2018, 11, 10)
            .unwrap()
            .and_hms_opt(23, 0, 0)
            .unwrap();
        fc.write_csv(&mut out, start).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.trim().lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "timestamp,level_point,level_lower,level_upper");
        assert!(lines[1].starts_with("11/11/2018 00:00,"));
    }
}
