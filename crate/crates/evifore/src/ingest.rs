//! Dataset loading, validation, and forecaster-state snapshots.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::domain::{ForecastSnapshot, TimePoint, TimeSeries, SNAPSHOT_VERSION};
use crate::error::{Error, Result};
use crate::forecaster::Forecaster;

/// Picks a CSV column either by 0-based position or by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(idx) => ColumnSelector::Index(idx),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

impl fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSelector::Index(i) => write!(f, "{i}"),
            ColumnSelector::Name(n) => f.write_str(n),
        }
    }
}

/// How to read a series out of a delimited file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSpec {
    pub value_column: ColumnSelector,
    /// When absent, rows are indexed 1..=n.
    pub time_column: Option<ColumnSelector>,
    pub has_header: bool,
    pub delimiter: u8,
}

impl Default for CsvSpec {
    fn default() -> Self {
        Self {
            value_column: ColumnSelector::Index(0),
            time_column: None,
            has_header: false,
            delimiter: b',',
        }
    }
}

/// Loads a series from a delimited file. Errors carry the 1-based file line
/// of the offending row.
pub fn load_csv<P: AsRef<Path>>(path: P, spec: &CsvSpec) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(spec.has_header)
        .delimiter(spec.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())
        .map_err(io_error)?;

    let value_idx = resolve_column(&mut reader, spec, &spec.value_column)?;
    let time_idx = match &spec.time_column {
        Some(sel) => Some(resolve_column(&mut reader, spec, sel)?),
        None => None,
    };

    let mut series = TimeSeries::default();
    let mut index = 0u64;
    for record in reader.records() {
        let record = record.map_err(io_error)?;
        let row = record
            .position()
            .map(|p| p.line())
            .unwrap_or(index + 1 + u64::from(spec.has_header));
        if record.len() == 1 && record[0].is_empty() {
            continue; // blank line
        }
        index += 1;

        let y = parse_field(&record, value_idx, row)?;
        if !y.is_finite() || y <= 0.0 {
            return Err(Error::NonPositiveValue { value: y, row: Some(row) });
        }
        let t = match time_idx {
            Some(idx) => parse_field(&record, idx, row)?,
            None => index as f64,
        };
        let point = TimePoint::new(t, y).map_err(|e| match e {
            Error::NonPositiveValue { value, .. } => {
                Error::NonPositiveValue { value, row: Some(row) }
            }
            other => other,
        })?;
        series.push(point).map_err(|e| match e {
            Error::NonMonotoneTimestamp { t_prev, t_new, .. } => {
                Error::NonMonotoneTimestamp { t_prev, t_new, row: Some(row) }
            }
            other => other,
        })?;
    }
    Ok(series)
}

/// Writes a series as `t,y` rows with a header, rendering values in
/// shortest round-trip form so a reload reproduces them bit-exactly.
pub fn write_csv<P: AsRef<Path>>(series: &TimeSeries, path: P) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(io_error)?;
    writer.write_record(["t", "y"]).map_err(io_error)?;
    for point in series.points() {
        writer
            .write_record([point.t().to_string(), point.y().to_string()])
            .map_err(io_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// The CSV spec matching [`write_csv`] output.
pub fn written_csv_spec() -> CsvSpec {
    CsvSpec {
        value_column: ColumnSelector::Name("y".to_string()),
        time_column: Some(ColumnSelector::Name("t".to_string())),
        has_header: true,
        delimiter: b',',
    }
}

fn resolve_column(
    reader: &mut csv::Reader<fs::File>,
    spec: &CsvSpec,
    selector: &ColumnSelector,
) -> Result<usize> {
    match selector {
        ColumnSelector::Index(i) => Ok(*i),
        ColumnSelector::Name(name) => {
            if !spec.has_header {
                return Err(Error::ColumnNotFound { name: name.clone() });
            }
            let headers = reader.headers().map_err(io_error)?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::ColumnNotFound { name: name.clone() })
        }
    }
}

fn parse_field(record: &csv::StringRecord, idx: usize, row: u64) -> Result<f64> {
    let field = record.get(idx).ok_or(Error::ColumnOutOfBounds {
        row,
        index: idx,
        width: record.len(),
    })?;
    field
        .parse::<f64>()
        .map_err(|_| Error::Parse { row, field: field.to_string() })
}

fn io_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            row: match &other {
                csv::ErrorKind::Utf8 { pos, .. } => pos.as_ref().map_or(0, |p| p.line()),
                _ => 0,
            },
            field: format!("{other:?}"),
        },
    }
}

/// Persists a forecaster as a versioned JSON document.
pub fn save_snapshot<P: AsRef<Path>>(forecaster: &Forecaster, path: P) -> Result<()> {
    let snapshot = forecaster.snapshot();
    let json = serde_json::to_string_pretty(&snapshot).map_err(|e| Error::CorruptSnapshot {
        reason: format!("serialization failed: {e}"),
    })?;
    fs::write(path.as_ref(), json)?;
    Ok(())
}

/// Restores a forecaster from a snapshot file, distinguishing version skew
/// from corruption.
pub fn load_snapshot<P: AsRef<Path>>(path: P) -> Result<Forecaster> {
    let text = fs::read_to_string(path.as_ref())?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::CorruptSnapshot {
            reason: format!("not valid JSON: {e}"),
        })?;
    let version = value
        .get("version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::CorruptSnapshot {
            reason: "missing version field".to_string(),
        })?;
    if version != u64::from(SNAPSHOT_VERSION) {
        return Err(Error::VersionMismatch { found: version, supported: SNAPSHOT_VERSION });
    }
    let snapshot: ForecastSnapshot =
        serde_json::from_value(value).map_err(|e| Error::CorruptSnapshot {
            reason: format!("schema mismatch: {e}"),
        })?;
    Forecaster::from_snapshot(snapshot)
}
