//! Regenerates the synthetic CSV fixtures under `fixtures/`. Deterministic:
//! rerunning produces byte-identical files.
//!
//! ```sh
//! cargo run -p loadcast-cli --example gen_fixtures
//! ```

use std::collections::BTreeMap;
use std::fs::File;

use chrono::NaiveDate;
use loadcast::model::{self, ModelParams, ModelSpec};
use loadcast::series::LoadSeries;
use loadcast::InnovationFamily;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn hourly_timestamps(n: usize) -> Vec<chrono::NaiveDateTime> {
    let start = NaiveDate::from_ymd_opt(2018, 1, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap();
    (0..n)
        .map(|i| start + chrono::Duration::hours(i as i64))
        .collect()
}

/// Unit-root levels: exp of a drifting log-price random walk. The levels are
/// integrated, the returns are white noise.
fn random_walk(n: usize) -> LoadSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut log_level = 70f64.ln();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(log_level.exp());
        let z: f64 = rng.sample(StandardNormal);
        log_level += 0.0002 + 0.008 * z;
    }
    LoadSeries::new(hourly_timestamps(n), values).unwrap()
}

/// Levels whose log-returns follow a sparse seasonal ARMA mean with
/// GARCH(1,1) variance, scaled to a realistic return magnitude.
fn garch_load(n: usize) -> LoadSeries {
    let spec = ModelSpec {
        ar_lags: [2].into(),
        ma_lags: [3].into(),
        sar_lags: [24].into(),
        sma_lags: [24].into(),
        season: 24,
        d: 0,
        garch_p: 1,
        garch_q: 1,
        innovation: InnovationFamily::StudentT,
    };
    let params = ModelParams {
        constant: 0.001,
        ar: BTreeMap::from([(2, 0.228)]),
        ma: BTreeMap::from([(3, 0.029)]),
        sar: BTreeMap::from([(24, 0.345)]),
        sma: BTreeMap::from([(24, -0.878)]),
        garch_omega: 0.370,
        garch_alpha: 0.562,
        garch_beta: 0.250,
        dist_shape: Some(6.0),
    };
    let path = model::simulate(&spec, &params, n - 1, 7).unwrap();
    let mut level = 70.0;
    let mut values = Vec::with_capacity(n);
    values.push(level);
    for r in &path.returns {
        level *= (0.01 * r).exp();
        values.push(level);
    }
    LoadSeries::new(hourly_timestamps(n), values).unwrap()
}

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
    for (name, series) in [
        ("random_walk.csv", random_walk(2000)),
        ("garch_load.csv", garch_load(2000)),
    ] {
        let path = format!("{dir}/{name}");
        series.write_csv(File::create(&path).unwrap()).unwrap();
        println!("wrote {path}");
    }
}
