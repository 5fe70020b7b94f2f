//! File formats: LDSP sentence-pair CSVs, the LDSE embedding container,
//! report JSON/CSV and SVG charts. Also the planted-signal generator.

mod ldse;
mod ldsp;
mod report;
mod svg;
mod synthetic;

pub use ldse::{decode_ldse, encode_ldse, read_ldse, write_ldse, LDSE_MAGIC, LDSE_VERSION};
pub use ldsp::{parse_ldsp_csv, read_ldsp_csv, write_ldsp_csv, LdspRecord};
pub use report::{
    evaluation_report_csv, fmt_sig17, property_report_csv, read_json, write_json, write_report_csv, CsvReport,
};
pub use svg::{render_combined_analysis, render_confusion_heatmap, render_evaluation_curve, render_svg, SvgReport};
pub use synthetic::{generate_synthetic, SyntheticSpec};

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed CSV at line {line}: {reason}")]
    MalformedCsv { path: PathBuf, line: u64, reason: String },
    #[error("{0}: file contains no records")]
    EmptyFile(PathBuf),
    #[error("{path}: unknown linguistic property `{name}`")]
    UnknownProperty { path: PathBuf, name: String },
    #[error("bad magic bytes, not an LDSE file")]
    BadMagic,
    #[error("unsupported LDSE version {0}")]
    UnsupportedVersion(u8),
    #[error("truncated file: needed {needed} bytes, found {found}")]
    TruncatedFile { needed: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid metadata: {0}")]
    Metadata(String),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

impl DataError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of a file's contents, lowercase hex.
pub fn hash_file(path: &Path) -> Result<String, DataError> {
    let bytes = std::fs::read(path).map_err(|e| DataError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}
