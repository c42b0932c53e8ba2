//! CSV dataset format.
//!
//! Data files carry a header row `time,<ch1>,<ch2>,...` with time in
//! seconds, strictly increasing at uniform spacing, and one value column
//! per channel. Values are written with 17 significant digits so they
//! survive the text round trip bit-exactly. Label sidecars use the same
//! layout with 0/1 cells.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::SignalMatrix;
use crate::synth::LabelMask;

/// Maximum deviation from uniform time spacing, in seconds.
pub const TIME_SPACING_TOLERANCE_S: f64 = 1e-9;

/// Formats a float with enough digits to round-trip exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parsed dataset plus the sample rate implied by its time column.
#[derive(Debug, Clone)]
pub struct CsvDataset {
    pub channel_ids: Vec<String>,
    pub channels: Vec<Vec<f64>>,
    /// Rate implied by the uniform time spacing.
    pub implied_rate_hz: f64,
}

impl CsvDataset {
    /// Builds a matrix that declares `rate_hz` as its sample rate. The
    /// caller decides which rate is authoritative; see
    /// [`CsvDataset::implied_rate_hz`].
    pub fn into_matrix(self, rate_hz: f64) -> Result<SignalMatrix> {
        SignalMatrix::new(self.channel_ids, self.channels, rate_hz)
    }
}

/// Reads a dataset, validating the header, cell values and the time
/// column (strictly increasing, uniform spacing, no non-finite cells).
pub fn read_csv<R: Read>(reader: R) -> Result<CsvDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| Error::Csv(format!("reading header: {e}")))?
        .clone();
    if headers.is_empty() || &headers[0] != "time" {
        return Err(Error::Csv(format!(
            "first column must be `time`, got `{}`",
            headers.get(0).unwrap_or("")
        )));
    }
    if headers.len() < 2 {
        return Err(Error::Csv("no channel columns".into()));
    }
    let channel_ids: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();

    let mut times = Vec::new();
    let mut channels: Vec<Vec<f64>> = vec![Vec::new(); channel_ids.len()];
    for (row_idx, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(format!("row {}: {e}", row_idx + 2)))?;
        if record.len() != headers.len() {
            return Err(Error::Csv(format!(
                "row {}: {} cells, expected {}",
                row_idx + 2,
                record.len(),
                headers.len()
            )));
        }
        let parse = |cell: &str, col: &str| -> Result<f64> {
            let v: f64 = cell.parse().map_err(|_| {
                Error::Csv(format!(
                    "row {}, column {col}: `{cell}` is not a number",
                    row_idx + 2
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Csv(format!(
                    "row {}, column {col}: non-finite value `{cell}`",
                    row_idx + 2
                )));
            }
            Ok(v)
        };
        times.push(parse(&record[0], "time")?);
        for (c, cell) in record.iter().skip(1).enumerate() {
            channels[c].push(parse(cell, &channel_ids[c])?);
        }
    }

    if times.len() < 2 {
        return Err(Error::Csv(format!(
            "need at least 2 rows, got {}",
            times.len()
        )));
    }
    let spacing = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::Csv("time column is not increasing".into()));
    }
    for (i, pair) in times.windows(2).enumerate() {
        let dt = pair[1] - pair[0];
        if dt <= 0.0 {
            return Err(Error::Csv(format!(
                "time column not strictly increasing at row {}",
                i + 3
            )));
        }
        if (dt - spacing).abs() > TIME_SPACING_TOLERANCE_S {
            return Err(Error::Csv(format!(
                "non-uniform time spacing at row {}: {dt} s vs {spacing} s",
                i + 3
            )));
        }
    }

    Ok(CsvDataset {
        channel_ids,
        channels,
        implied_rate_hz: 1.0 / spacing,
    })
}

pub fn read_csv_path(path: &Path) -> Result<CsvDataset> {
    read_csv(std::fs::File::open(path)?)
}

/// Writes a matrix in the dataset format, with `time = index / rate`.
pub fn write_csv<W: Write>(writer: W, matrix: &SignalMatrix) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["time".to_string()];
    header.extend(matrix.channel_ids().iter().cloned());
    wtr.write_record(&header)
        .map_err(|e| Error::Csv(e.to_string()))?;
    let rate = matrix.sample_rate_hz();
    for i in 0..matrix.n_samples() {
        let mut row = vec![format_float(i as f64 / rate)];
        for c in 0..matrix.n_channels() {
            row.push(format_float(matrix.channel(c)?[i]));
        }
        wtr.write_record(&row)
            .map_err(|e| Error::Csv(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv_path(path: &Path, matrix: &SignalMatrix) -> Result<()> {
    write_csv(std::fs::File::create(path)?, matrix)
}

/// Writes a label sidecar: same header and time column, 0/1 cells.
pub fn write_labels_csv<W: Write>(
    writer: W,
    matrix: &SignalMatrix,
    labels: &LabelMask,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["time".to_string()];
    header.extend(matrix.channel_ids().iter().cloned());
    wtr.write_record(&header)
        .map_err(|e| Error::Csv(e.to_string()))?;
    let rate = matrix.sample_rate_hz();
    for i in 0..matrix.n_samples() {
        let mut row = vec![format_float(i as f64 / rate)];
        for c in 0..matrix.n_channels() {
            row.push(if labels.mask()[c][i] { "1" } else { "0" }.to_string());
        }
        wtr.write_record(&row)
            .map_err(|e| Error::Csv(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_labels_csv_path(
    path: &Path,
    matrix: &SignalMatrix,
    labels: &LabelMask,
) -> Result<()> {
    write_labels_csv(std::fs::File::create(path)?, matrix, labels)
}
