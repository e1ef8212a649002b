//! Forecast scoring (MSE / MAE) and ranked model comparison.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub mse: f64,
    pub mae: f64,
    pub n: usize,
    /// Signed errors actual - predicted, per step.
    pub per_step_errors: Vec<f64>,
}

/// Mean squared and mean absolute error of predictions against actuals.
pub fn score(actual: &[f64], predicted: &[f64]) -> Result<ScoreReport> {
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    let errors: Vec<f64> = actual.iter().zip(predicted).map(|(a, p)| a - p).collect();
    let n = errors.len() as f64;
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / n;
    let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / n;
    Ok(ScoreReport {
        mse,
        mae,
        n: errors.len(),
        per_step_errors: errors,
    })
}

/// Scores every named prediction sequence and ranks ascending by MSE,
/// breaking ties by MAE.
pub fn compare(
    actual: &[f64],
    predictions: &BTreeMap<String, Vec<f64>>,
) -> Result<ComparisonReport> {
    let mut entries = Vec::with_capacity(predictions.len());
    for (name, predicted) in predictions {
        entries.push(RankedScore {
            name: name.clone(),
            score: score(actual, predicted)?,
        });
    }
    entries.sort_by(|a, b| {
        a.score
            .mse
            .total_cmp(&b.score.mse)
            .then(a.score.mae.total_cmp(&b.score.mae))
    });
    Ok(ComparisonReport { ranked: entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedScore {
    pub name: String,
    pub score: ScoreReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub ranked: Vec<RankedScore>,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<4} {:<24} {:>12} {:>12}", "Rank", "Model", "MSE", "MAE")?;
        for (i, entry) in self.ranked.iter().enumerate() {
            writeln!(
                f,
                "{:<4} {:<24} {:>12.4} {:>12.4}",
                i + 1,
                entry.name,
                entry.score.mse,
                entry.score.mae
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identical_sequences_score_zero() {
        let x = [1.0, 2.0, 3.0];
        let r = score(&x, &x).unwrap();
        assert_eq!(r.mse, 0.0);
        assert_eq!(r.mae, 0.0);
        assert_eq!(r.n, 3);
    }

    #[test]
    fn mse_mae_definitions() {
        let r = score(&[1.0, 2.0], &[0.0, 4.0]).unwrap();
        assert_relative_eq!(r.mse, (1.0 + 4.0) / 2.0);
        assert_relative_eq!(r.mae, (1.0 + 2.0) / 2.0);
        assert_eq!(r.per_step_errors, vec![1.0, -2.0]);
    }

    #[test]
    fn symmetric_in_argument_order() {
        let a = [1.0, 5.0, -2.0, 0.3];
        let b = [0.7, 4.1, -2.5, 1.0];
        let ab = score(&a, &b).unwrap();
        let ba = score(&b, &a).unwrap();
        assert_eq!(ab.mse, ba.mse);
        assert_eq!(ab.mae, ba.mae);
    }

    #[test]
    fn shift_invariance() {
        let a = [1.0, 5.0, -2.0];
        let b = [0.7, 4.1, -2.5];
        let shifted_a: Vec<f64> = a.iter().map(|v| v + 17.3).collect();
        let shifted_b: Vec<f64> = b.iter().map(|v| v + 17.3).collect();
        let base = score(&a, &b).unwrap();
        let moved = score(&shifted_a, &shifted_b).unwrap();
        assert_relative_eq!(base.mse, moved.mse, epsilon = 1e-12);
        assert_relative_eq!(base.mae, moved.mae, epsilon = 1e-12);
    }

    #[test]
    fn jensen_inequality() {
        let a = [1.0, 5.0, -2.0, 0.3, 9.0];
        let b = [0.7, 4.1, -2.5, 1.0, 7.7];
        let r = score(&a, &b).unwrap();
        assert!(r.mae * r.mae <= r.mse + 1e-12);
    }

    #[test]
    fn errors_on_bad_input() {
        assert!(matches!(score(&[], &[]), Err(Error::EmptyInput)));
        assert!(matches!(
            score(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn compare_ranks_by_mse() {
        let actual = vec![1.0, 2.0, 3.0];
        let mut predictions = BTreeMap::new();
        predictions.insert("good".to_string(), vec![1.1, 2.0, 3.0]);
        predictions.insert("exact".to_string(), actual.clone());
        predictions.insert("bad".to_string(), vec![3.0, 0.0, 5.0]);
        let report = compare(&actual, &predictions).unwrap();
        let names: Vec<&str> = report.ranked.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, vec!["exact", "good", "bad"]);
        assert_eq!(report.ranked[0].score.mse, 0.0);
    }

    #[test]
    fn compare_single_entry() {
        let actual = vec![1.0, 2.0];
        let mut predictions = BTreeMap::new();
        predictions.insert("only".to_string(), vec![1.0, 2.5]);
        let report = compare(&actual, &predictions).unwrap();
        assert_eq!(report.ranked.len(), 1);
    }

    #[test]
    fn display_renders_table() {
        let actual = vec![1.0, 2.0];
        let mut predictions = BTreeMap::new();
        predictions.insert("m".to_string(), vec![1.0, 2.0]);
        let text = compare(&actual, &predictions).unwrap().to_string();
        assert!(text.contains("MSE"));
        assert!(text.contains('m'));
    }
}
