//! Load and return series types, the log-return transform and its inverse.

use std::io::{Read, Write};
use std::path::Path;

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TIMESTAMP_FORMATS: &[&str] = &[
    "%m/%d/%Y %H:%M",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    TIMESTAMP_FORMATS
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(s.trim(), fmt).ok())
}

/// Hourly load levels, strictly positive, on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadSeries {
    timestamps: Vec<NaiveDateTime>,
    values: Vec<f64>,
}

impl LoadSeries {
    pub fn new(timestamps: Vec<NaiveDateTime>, values: Vec<f64>) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: timestamps.len(),
                right: values.len(),
            });
        }
        if values.len() < 2 {
            return Err(Error::SeriesTooShort {
                got: values.len(),
                need: 2,
            });
        }
        for (i, w) in timestamps.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NonIncreasingTimestamps(i + 1));
            }
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveLevel { index: i, value: v });
            }
        }
        Ok(Self { timestamps, values })
    }

    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Reads a `timestamp,load` CSV. The grid must be exactly hourly:
    /// gaps are rejected, not imputed.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let mut timestamps = Vec::new();
        let mut values = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let line = i + 2; // header is line 1
            let record = record.map_err(|e| Error::CsvParse {
                line,
                msg: e.to_string(),
            })?;
            if record.len() < 2 {
                return Err(Error::CsvParse {
                    line,
                    msg: "expected two columns: timestamp,load".into(),
                });
            }
            let ts = parse_timestamp(&record[0]).ok_or_else(|| Error::CsvParse {
                line,
                msg: format!("unparseable timestamp {:?}", &record[0]),
            })?;
            let v: f64 = record[1].trim().parse().map_err(|_| Error::CsvParse {
                line,
                msg: format!("unparseable load value {:?}", &record[1]),
            })?;
            timestamps.push(ts);
            values.push(v);
        }
        for (i, w) in timestamps.windows(2).enumerate() {
            if w[1] - w[0] != Duration::hours(1) {
                return Err(Error::IrregularGrid(i + 1));
            }
        }
        Self::new(timestamps, values)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["timestamp", "load"])
            .map_err(|e| Error::CsvParse { line: 1, msg: e.to_string() })?;
        for (ts, v) in self.timestamps.iter().zip(&self.values) {
            w.write_record([ts.format("%m/%d/%Y %H:%M").to_string(), format!("{v}")])
                .map_err(|e| Error::CsvParse { line: 0, msg: e.to_string() })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Log-returns of a load series together with the level that anchors
/// reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    timestamps: Vec<NaiveDateTime>,
    values: Vec<f64>,
    origin_level: f64,
}

impl ReturnSeries {
    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin_level(&self) -> f64 {
        self.origin_level
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last_timestamp(&self) -> NaiveDateTime {
        *self.timestamps.last().expect("non-empty by construction")
    }

    /// Level immediately before the last return, i.e. the forecast origin
    /// after training on this series.
    pub fn last_level(&self) -> f64 {
        let log_last = self.origin_level.ln() + self.values.iter().sum::<f64>();
        log_last.exp()
    }
}

/// r[i] = ln(S[i+1] / S[i]).
pub fn log_returns(series: &LoadSeries) -> ReturnSeries {
    let s = series.values();
    let values = s.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    ReturnSeries {
        timestamps: series.timestamps()[1..].to_vec(),
        values,
        origin_level: s[0],
    }
}

/// Inverse of [`log_returns`]: S[0] = origin, S[i+1] = S[i] * exp(r[i]).
pub fn reconstruct_levels(returns: &ReturnSeries) -> Result<LoadSeries> {
    let step = if returns.timestamps.len() >= 2 {
        returns.timestamps[1] - returns.timestamps[0]
    } else {
        Duration::hours(1)
    };
    let mut timestamps = Vec::with_capacity(returns.len() + 1);
    timestamps.push(returns.timestamps[0] - step);
    timestamps.extend_from_slice(&returns.timestamps);
    let mut values = Vec::with_capacity(returns.len() + 1);
    let mut level = returns.origin_level;
    values.push(level);
    for &r in &returns.values {
        level *= r.exp();
        values.push(level);
    }
    LoadSeries::new(timestamps, values)
}

/// Contiguous train/holdout split. Both halves carry origin levels so that
/// each reconstructs its own stretch of the level path.
pub fn split(returns: &ReturnSeries, holdout: usize) -> Result<(ReturnSeries, ReturnSeries)> {
    let n = returns.len();
    if holdout == 0 || holdout >= n {
        return Err(Error::HoldoutOutOfRange { holdout, len: n });
    }
    let cut = n - holdout;
    let train = ReturnSeries {
        timestamps: returns.timestamps[..cut].to_vec(),
        values: returns.values[..cut].to_vec(),
        origin_level: returns.origin_level,
    };
    let test = ReturnSeries {
        timestamps: returns.timestamps[cut..].to_vec(),
        values: returns.values[cut..].to_vec(),
        origin_level: train.last_level(),
    };
    Ok((train, test))
}
