use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DataError;
use crate::properties::LinguisticProperty;

/// One sentence pair; `sentence1` is the base form, `sentence2` the
/// transformed one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LdspRecord {
    pub property: LinguisticProperty,
    pub sentence1: String,
    pub sentence2: String,
}

struct Layout {
    s1: usize,
    s2: usize,
    property: Option<usize>,
    width: usize,
}

fn detect_layout(header: &csv::StringRecord, path: &Path) -> Result<Layout, DataError> {
    let names: Vec<String> = header.iter().map(|h| h.trim().trim_start_matches('\u{feff}').to_ascii_lowercase()).collect();
    let find = |want: &str| names.iter().position(|n| n == want);
    let (Some(s1), Some(s2)) = (find("sentence1"), find("sentence2")) else {
        return Err(DataError::MalformedCsv {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected a `sentence1,sentence2` header, found `{}`", names.join(",")),
        });
    };
    if s1 > 0 {
        log::info!("{}: ignoring {} leading column(s) before sentence1", path.display(), s1);
    }
    Ok(Layout { s1, s2, property: find("property"), width: names.len() })
}

/// Parses LDSP CSV text. `path` is used for error messages and, when there is
/// no `property` column, its file stem names the property.
pub fn parse_ldsp_csv(text: &[u8], path: &Path) -> Result<Vec<LdspRecord>, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text);
    let mut rows = reader.records();

    let header = match rows.next() {
        None => return Err(DataError::EmptyFile(path.to_path_buf())),
        Some(r) => r.map_err(|e| malformed(path, &e))?,
    };
    let layout = detect_layout(&header, path)?;

    let stem_property = || {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        stem.parse::<LinguisticProperty>().map_err(|_| DataError::UnknownProperty {
            path: path.to_path_buf(),
            name: stem.to_string(),
        })
    };
    let default_property = if layout.property.is_none() { Some(stem_property()?) } else { None };

    let mut out = Vec::new();
    for row in rows {
        let row = row.map_err(|e| malformed(path, &e))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if row.len() != layout.width {
            return Err(DataError::MalformedCsv {
                path: path.to_path_buf(),
                line,
                reason: format!("expected {} fields, found {}", layout.width, row.len()),
            });
        }
        let s1 = row[layout.s1].trim();
        let s2 = row[layout.s2].trim();
        if s1.is_empty() || s2.is_empty() {
            return Err(DataError::MalformedCsv {
                path: path.to_path_buf(),
                line,
                reason: "empty sentence".into(),
            });
        }
        let property = match (layout.property, default_property) {
            (Some(col), _) => row[col].parse().map_err(|_| DataError::UnknownProperty {
                path: path.to_path_buf(),
                name: row[col].to_string(),
            })?,
            (None, Some(p)) => p,
            (None, None) => unreachable!("property comes from a column or the file name"),
        };
        out.push(LdspRecord { property, sentence1: s1.to_string(), sentence2: s2.to_string() });
    }
    if out.is_empty() {
        return Err(DataError::EmptyFile(path.to_path_buf()));
    }
    Ok(out)
}

fn malformed(path: &Path, e: &csv::Error) -> DataError {
    DataError::MalformedCsv {
        path: path.to_path_buf(),
        line: e.position().map_or(0, |p| p.line()),
        reason: e.to_string(),
    }
}

pub fn read_ldsp_csv(path: &Path) -> Result<Vec<LdspRecord>, DataError> {
    let bytes = std::fs::read(path).map_err(|e| DataError::io(path, e))?;
    parse_ldsp_csv(&bytes, path)
}

/// Writes `sentence1,sentence2` rows (RFC 4180 quoting).
pub fn write_ldsp_csv(path: &Path, records: &[LdspRecord]) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| DataError::io(path, std::io::Error::other(e));
    w.write_record(["sentence1", "sentence2"]).map_err(io_err)?;
    for r in records {
        w.write_record([&r.sentence1, &r.sentence2]).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| DataError::io(path, std::io::Error::other(e.to_string())))?;
    std::fs::write(path, bytes).map_err(|e| DataError::io(path, e))
}
