//! CSV and JSON serialization of correlation curves and spectra.
//!
//! CSV files have the header `index,theta_radians,value`. For a correlation
//! curve `theta_radians` is the setting offset `2πt/M`; for a power spectrum
//! it is the wavenumber `k` scaled the same way and `value` is `|Ã(k)|²`.
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces the values exactly.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::grid::SettingGrid;

use super::{CorrelationFunction, SpectrumReport};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("row {row} has index {index}; rows must be 0, 1, 2, …")]
    OutOfOrder { row: usize, index: usize },
    #[error(transparent)]
    Grid(#[from] crate::ModelError),
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    index: usize,
    theta_radians: f64,
    value: f64,
}

/// Writes `values` as `index,theta_radians,value` rows.
pub fn write_series_csv<W: Write>(grid: SettingGrid, values: &[f64], out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for (index, &value) in values.iter().enumerate() {
        w.serialize(Row { index, theta_radians: grid.theta(index), value })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a series written by [`write_series_csv`].
pub fn read_series_csv<R: Read>(input: R) -> Result<Vec<f64>, IoError> {
    let mut r = csv::Reader::from_reader(input);
    let mut values = Vec::new();
    for (row, rec) in r.deserialize::<Row>().enumerate() {
        let rec = rec?;
        if rec.index != row {
            return Err(IoError::OutOfOrder { row, index: rec.index });
        }
        values.push(rec.value);
    }
    Ok(values)
}

pub fn write_correlation_csv<W: Write>(c: &CorrelationFunction, out: W) -> Result<(), IoError> {
    write_series_csv(c.grid, &c.values, out)
}

pub fn read_correlation_csv<R: Read>(input: R) -> Result<CorrelationFunction, IoError> {
    let values = read_series_csv(input)?;
    let grid = SettingGrid::new(values.len())?;
    Ok(CorrelationFunction { grid, values })
}

pub fn write_power_csv<W: Write>(report: &SpectrumReport, out: W) -> Result<(), IoError> {
    write_series_csv(SettingGrid::new(report.grid_points)?, &report.power, out)
}

/// Correlation curve and spectrum report in one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub strategy: String,
    pub seed: u64,
    pub correlation: CorrelationFunction,
    pub report: SpectrumReport,
}

impl SpectrumDocument {
    pub fn to_json(&self) -> Result<String, IoError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }
}
