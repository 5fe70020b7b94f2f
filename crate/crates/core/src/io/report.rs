use std::fmt::Write as _;
use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use super::DataError;
use crate::edi::PropertyReport;
use crate::evaluation::EvaluationReport;

/// Float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), DataError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| DataError::Json { path: path.to_path_buf(), source: e })?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| DataError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, DataError> {
    let bytes = std::fs::read(path).map_err(|e| DataError::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| DataError::Json { path: path.to_path_buf(), source: e })
}

/// `dimension,p_value,mi,rfe_weight,edi`, one row per dimension in report
/// order (EDI descending).
pub fn property_report_csv(report: &PropertyReport) -> String {
    let mut out = String::from("dimension,p_value,mi,rfe_weight,edi\n");
    for d in &report.dims {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            d.dimension,
            fmt_sig17(d.p_value),
            fmt_sig17(d.mi),
            fmt_sig17(d.rfe_weight),
            fmt_sig17(d.edi)
        );
    }
    out
}

/// `metric,k,accuracy` rows: baseline, each high-EDI curve point, low-EDI,
/// then one `cross:<property>` row per other property.
pub fn evaluation_report_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("metric,k,accuracy\n");
    let _ = writeln!(out, "baseline,,{}", fmt_sig17(report.baseline_accuracy));
    for p in &report.high_edi_curve {
        let _ = writeln!(out, "high_edi,{},{}", p.k, fmt_sig17(p.accuracy));
    }
    let _ = writeln!(out, "low_edi,{},{}", report.bottom_k, fmt_sig17(report.low_edi_accuracy));
    for (name, acc) in &report.cross_property {
        let _ = writeln!(out, "cross:{name},{},{}", report.cross_k, fmt_sig17(*acc));
    }
    out
}

pub trait CsvReport {
    fn to_csv(&self) -> String;
}

impl CsvReport for PropertyReport {
    fn to_csv(&self) -> String {
        property_report_csv(self)
    }
}

impl CsvReport for EvaluationReport {
    fn to_csv(&self) -> String {
        evaluation_report_csv(self)
    }
}

pub fn write_report_csv<R: CsvReport>(path: &Path, report: &R) -> Result<(), DataError> {
    std::fs::write(path, report.to_csv()).map_err(|e| DataError::io(path, e))
}
