//! Report serialization.
//!
//! JSON is the canonical format, with stable keys
//! `run_id`, `dataset`, `model`, `metrics` (name -> `{value, direction}`)
//! and `config`. Floats are written in their shortest round-trip form, so
//! parsing a written report gives back the exact same values. CSV flattens
//! one row per (run, metric).

use std::fs;
use std::path::Path;

use genmetrics_core::report::{CorrelationMatrix, Direction, MetricReport};

use crate::error::{Error, Result};

pub fn report_to_json(report: &MetricReport) -> Result<String> {
    report.validate()?;
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn report_from_json(text: &str) -> serde_json::Result<MetricReport> {
    serde_json::from_str(text)
}

pub fn read_report(path: impl AsRef<Path>) -> Result<MetricReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report = report_from_json(&text).map_err(|e| {
        Error::parse(path, crate::Location::Line(e.line()), format!("invalid report: {e}"))
    })?;
    report.validate().map_err(|source| Error::Data {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(report)
}

pub const CSV_HEADER: [&str; 6] = ["run_id", "dataset", "model", "metric", "value", "direction"];

pub fn reports_to_csv(reports: &[MetricReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Output(e.to_string());
    w.write_record(CSV_HEADER).map_err(err)?;
    for report in reports {
        report.validate()?;
        for (name, m) in &report.metrics {
            let direction = match m.direction {
                Direction::Lower => "lower",
                Direction::Higher => "higher",
            };
            w.write_record([
                report.run_id.as_str(),
                &report.dataset,
                &report.model,
                name,
                &m.value.to_string(),
                direction,
            ])
            .map_err(err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Output(e.to_string()))
}

pub fn correlation_to_json(matrix: &CorrelationMatrix) -> Result<String> {
    let mut s = serde_json::to_string_pretty(matrix).map_err(|e| Error::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Square CSV: a `metric` column followed by one column per metric.
pub fn correlation_to_csv(matrix: &CorrelationMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Output(e.to_string());
    let mut header = vec!["metric".to_string()];
    header.extend(matrix.metric_names.iter().cloned());
    w.write_record(&header).map_err(err)?;
    for (name, row) in matrix.metric_names.iter().zip(&matrix.values) {
        let mut record = vec![name.clone()];
        record.extend(row.iter().map(f64::to_string));
        w.write_record(&record).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Output(e.to_string()))
}
