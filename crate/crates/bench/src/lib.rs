//! Shared setup for the pipeline benchmarks.

use std::collections::BTreeMap;

use loadcast::{InnovationFamily, ModelParams, ModelSpec};

/// The sparse seasonal spec exercised by every benchmark.
pub fn bench_spec() -> ModelSpec {
    ModelSpec {
        ar_lags: [2].into(),
        ma_lags: [3].into(),
        sar_lags: [24].into(),
        sma_lags: [24].into(),
        season: 24,
        d: 0,
        garch_p: 1,
        garch_q: 1,
        innovation: InnovationFamily::Normal,
    }
}

pub fn bench_params() -> ModelParams {
    ModelParams {
        constant: 0.001,
        ar: BTreeMap::from([(2, 0.228)]),
        ma: BTreeMap::from([(3, 0.029)]),
        sar: BTreeMap::from([(24, 0.345)]),
        sma: BTreeMap::from([(24, -0.878)]),
        garch_omega: 0.370,
        garch_alpha: 0.562,
        garch_beta: 0.250,
        dist_shape: None,
    }
}
