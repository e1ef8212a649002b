//! Stationarity and conditional-heteroskedasticity diagnostics: augmented
//! Dickey-Fuller, Ljung-Box and McLeod-Li.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestMethod {
    #[serde(rename = "ADF")]
    Adf,
    #[serde(rename = "LJUNG_BOX")]
    LjungBox,
    #[serde(rename = "MCLEOD_LI")]
    McLeodLi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: TestMethod,
    pub statistic: f64,
    pub p_value: f64,
    pub lags_used: usize,
}

/// Default McLeod-Li / Ljung-Box lag count.
pub const DEFAULT_PORTMANTEAU_LAGS: usize = 20;

/// Dickey-Fuller t-distribution percentiles for the constant, no-trend
/// regression: the 1/2.5/5/10 percent critical values plus tail anchors.
/// P-values come from linear interpolation, clamped to [0.001, 0.999].
const DF_TABLE: &[(f64, f64)] = &[
    (-4.38, 0.001),
    (-3.43, 0.010),
    (-3.12, 0.025),
    (-2.86, 0.050),
    (-2.57, 0.100),
    (-1.57, 0.500),
    (-0.44, 0.900),
    (-0.07, 0.950),
    (0.23, 0.975),
    (0.60, 0.990),
    (1.70, 0.999),
];

fn df_p_value(stat: f64) -> f64 {
    if stat <= DF_TABLE[0].0 {
        return DF_TABLE[0].1;
    }
    if stat >= DF_TABLE[DF_TABLE.len() - 1].0 {
        return DF_TABLE[DF_TABLE.len() - 1].1;
    }
    for w in DF_TABLE.windows(2) {
        let (x0, p0) = w[0];
        let (x1, p1) = w[1];
        if stat < x1 {
            return (p0 + (p1 - p0) * (stat - x0) / (x1 - x0)).clamp(0.001, 0.999);
        }
    }
    unreachable!()
}

/// Schwert rule for the default augmentation order.
pub fn schwert_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Augmented Dickey-Fuller test with constant, no trend:
/// dy_t = c + rho * y_{t-1} + sum_i delta_i dy_{t-i} + e_t.
/// The statistic is the t-ratio on rho; the null is a unit root.
pub fn adf_test(values: &[f64], lags: Option<usize>) -> Result<TestReport> {
    let n = values.len();
    let p = lags.unwrap_or_else(|| schwert_lags(n));
    if n < p + 10 {
        return Err(Error::SeriesTooShort { got: n, need: p + 10 });
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Err(Error::ConstantSeries);
    }
    let dy: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let rows = dy.len() - p;
    let mut x = Vec::with_capacity(rows);
    let mut y = Vec::with_capacity(rows);
    for t in p..dy.len() {
        let mut row = Vec::with_capacity(p + 2);
        row.push(1.0);
        row.push(values[t]); // y_{t-1} relative to dy index t
        for i in 1..=p {
            row.push(dy[t - i]);
        }
        x.push(row);
        y.push(dy[t]);
    }
    let (beta, se) = linalg::ols(&x, &y)?;
    let stat = beta[1] / se[1];
    if !stat.is_finite() {
        return Err(Error::SingularMatrix);
    }
    Ok(TestReport {
        method: TestMethod::Adf,
        statistic: stat,
        p_value: df_p_value(stat),
        lags_used: p,
    })
}

/// Q statistic from precomputed autocorrelations.
pub(crate) fn ljung_box_q(acf: &[f64], n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf + 2.0)
        * acf
            .iter()
            .enumerate()
            .map(|(i, &r)| r * r / (nf - (i + 1) as f64))
            .sum::<f64>()
}

fn chi2_sf(q: f64, dof: usize) -> f64 {
    if q <= 0.0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(q)
}

fn sample_acf(values: &[f64], lags: usize) -> Result<Vec<f64>> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let denom: f64 = x.iter().map(|v| v * v).sum();
    if denom == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok((1..=lags)
        .map(|k| x[k..].iter().zip(&x[..n - k]).map(|(a, b)| a * b).sum::<f64>() / denom)
        .collect())
}

/// Ljung-Box portmanteau test on the demeaned values.
pub fn ljung_box(values: &[f64], lags: usize) -> Result<TestReport> {
    let n = values.len();
    if lags == 0 || lags >= n {
        return Err(Error::InvalidLags { lags, len: n });
    }
    let acf = sample_acf(values, lags)?;
    let q = ljung_box_q(&acf, n);
    Ok(TestReport {
        method: TestMethod::LjungBox,
        statistic: q,
        p_value: chi2_sf(q, lags),
        lags_used: lags,
    })
}

/// McLeod-Li test: Ljung-Box applied to the squared demeaned values.
pub fn mcleod_li(values: &[f64], lags: usize) -> Result<TestReport> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n.max(1) as f64;
    let squares: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let report = ljung_box(&squares, lags)?;
    Ok(TestReport {
        method: TestMethod::McLeodLi,
        ..report
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::innovations::InnovationDist;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::Distribution as _;

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        InnovationDist::normal().sample(n, seed)
    }

    #[test]
    fn schwert_rule() {
        assert_eq!(schwert_lags(2000), 25);
        assert_eq!(schwert_lags(100), 12);
    }

    #[test]
    fn adf_unit_root_fails_to_reject() {
        // Drifting random walk: a unit-root process like the load levels.
        let mut hold = 0usize;
        for seed in 0..100u64 {
            let eps = noise(2000, 1000 + seed);
            let mut y = Vec::with_capacity(eps.len());
            let mut acc = 0.0;
            for e in eps {
                acc += 0.1 + e;
                y.push(acc);
            }
            if adf_test(&y, None).unwrap().p_value > 0.1 {
                hold += 1;
            }
        }
        assert!(hold >= 95, "unit root retained in only {hold}/100 trials");
    }

    #[test]
    fn adf_white_noise_rejects() {
        let mut reject = 0usize;
        for seed in 0..100u64 {
            let y = noise(2000, 2000 + seed);
            if adf_test(&y, None).unwrap().p_value < 0.01 {
                reject += 1;
            }
        }
        assert!(reject >= 95, "stationarity detected in only {reject}/100 trials");
    }

    #[test]
    fn adf_constant_series_errors() {
        assert!(matches!(
            adf_test(&vec![5.0; 200], None),
            Err(Error::ConstantSeries)
        ));
    }

    #[test]
    fn adf_too_short_errors() {
        assert!(adf_test(&[1.0, 2.0, 3.0], Some(2)).is_err());
    }

    #[test]
    fn adf_shift_invariance() {
        let y: Vec<f64> = noise(500, 9)
            .iter()
            .scan(0.0, |acc, e| {
                *acc += e;
                Some(*acc)
            })
            .collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + 123.4).collect();
        let a = adf_test(&y, Some(4)).unwrap();
        let b = adf_test(&shifted, Some(4)).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-8);
    }

    #[test]
    fn ljung_box_size_on_iid_noise() {
        let mut reject = 0usize;
        for seed in 0..100u64 {
            let y = noise(5000, 3000 + seed);
            if ljung_box(&y, 20).unwrap().p_value < 0.05 {
                reject += 1;
            }
        }
        assert!(reject <= 10, "size {reject}/100 at nominal 5%");
    }

    #[test]
    fn ljung_box_power_on_ar1() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let mut y = vec![0.0f64; 2000];
        for t in 1..y.len() {
            y[t] = 0.9 * y[t - 1] + normal.sample(&mut rng);
        }
        let report = ljung_box(&y, 20).unwrap();
        assert!(report.p_value < 1e-6);
    }

    #[test]
    fn ljung_box_zero_acf_gives_unit_p() {
        let q = ljung_box_q(&[0.0; 20], 500);
        assert_eq!(q, 0.0);
        assert_eq!(chi2_sf(q, 20), 1.0);
    }

    #[test]
    fn ljung_box_q_nondecreasing_in_lags() {
        let y = noise(400, 5);
        let mut prev = 0.0;
        for m in 1..=30 {
            let q = ljung_box(&y, m).unwrap().statistic;
            assert!(q >= prev - 1e-12);
            prev = q;
        }
    }

    #[test]
    fn ljung_box_lag_bounds() {
        let y = noise(50, 1);
        assert!(ljung_box(&y, 0).is_err());
        assert!(ljung_box(&y, 50).is_err());
    }

    #[test]
    fn mcleod_li_equals_ljung_box_on_squares() {
        let y = noise(300, 13);
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let sq: Vec<f64> = y.iter().map(|v| (v - mean) * (v - mean)).collect();
        let a = mcleod_li(&y, 15).unwrap();
        let b = ljung_box(&sq, 15).unwrap();
        assert_eq!(a.statistic, b.statistic);
        assert_eq!(a.p_value, b.p_value);
        assert_eq!(a.method, TestMethod::McLeodLi);
    }

    #[test]
    fn mcleod_li_detects_garch() {
        // gamma=0.1, alpha=0.3, beta=0.5
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let mut sigma2 = 0.1 / (1.0 - 0.8);
        let mut a_prev = 0.0f64;
        let mut y = Vec::with_capacity(5000);
        for _ in 0..5000 {
            sigma2 = 0.1 + 0.3 * a_prev * a_prev + 0.5 * sigma2;
            a_prev = sigma2.sqrt() * normal.sample(&mut rng);
            y.push(a_prev);
        }
        assert!(mcleod_li(&y, 20).unwrap().p_value < 0.01);
    }

    #[test]
    fn mcleod_li_size_on_iid_noise() {
        let mut reject = 0usize;
        for seed in 0..100u64 {
            let y = noise(5000, 4000 + seed);
            if mcleod_li(&y, 20).unwrap().p_value < 0.05 {
                reject += 1;
            }
        }
        assert!(reject <= 10, "size {reject}/100 at nominal 5%");
    }

    #[test]
    fn mcleod_li_constant_series_errors() {
        assert!(matches!(
            mcleod_li(&vec![3.0; 100], 10),
            Err(Error::ConstantSeries)
        ));
    }

    #[test]
    fn report_serializes_with_method_tag() {
        let r = TestReport {
            method: TestMethod::Adf,
            statistic: -1.5,
            p_value: 0.52,
            lags_used: 25,
        };
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains(r#""method":"ADF""#));
        let back: TestReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
