//! LDSE v1: little-endian paired-embedding container.
//!
//! ```text
//! "LDSE" | u8 version=1 | u32 n_pairs | u32 dim | u32 meta_len | meta (UTF-8 JSON)
//! then n_pairs records of 2*dim f32: the s1 row followed by the s2 row
//! ```

use std::path::Path;

use super::DataError;
use crate::pairs::{EmbeddingMeta, EmbeddingPairSet};

pub const LDSE_MAGIC: &[u8; 4] = b"LDSE";
pub const LDSE_VERSION: u8 = 0x01;
const HEADER_LEN: usize = 4 + 1 + 4 + 4 + 4;

pub fn encode_ldse(set: &EmbeddingPairSet) -> Result<Vec<u8>, DataError> {
    let meta = serde_json::to_vec(&set.meta).map_err(|e| DataError::Metadata(e.to_string()))?;
    let to_u32 = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| DataError::ShapeMismatch(format!("{what} {v} does not fit in u32")))
    };
    let n = set.n_pairs();
    let dim = set.dim();
    let mut out = Vec::with_capacity(HEADER_LEN + meta.len() + n * dim * 8);
    out.extend_from_slice(LDSE_MAGIC);
    out.push(LDSE_VERSION);
    out.extend_from_slice(&to_u32(n, "n_pairs")?.to_le_bytes());
    out.extend_from_slice(&to_u32(dim, "dim")?.to_le_bytes());
    out.extend_from_slice(&to_u32(meta.len(), "metadata length")?.to_le_bytes());
    out.extend_from_slice(&meta);
    for i in 0..n {
        for v in set.s1_row(i).iter().chain(set.s2_row(i)) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

pub fn decode_ldse(bytes: &[u8]) -> Result<EmbeddingPairSet, DataError> {
    if bytes.len() < 4 || &bytes[..4] != LDSE_MAGIC {
        return Err(if bytes.len() < 4 && LDSE_MAGIC.starts_with(bytes) {
            DataError::TruncatedFile { needed: HEADER_LEN, found: bytes.len() }
        } else {
            DataError::BadMagic
        });
    }
    if bytes.len() < 5 {
        return Err(DataError::TruncatedFile { needed: HEADER_LEN, found: bytes.len() });
    }
    if bytes[4] != LDSE_VERSION {
        return Err(DataError::UnsupportedVersion(bytes[4]));
    }
    if bytes.len() < HEADER_LEN {
        return Err(DataError::TruncatedFile { needed: HEADER_LEN, found: bytes.len() });
    }
    let n = read_u32(bytes, 5) as usize;
    let dim = read_u32(bytes, 9) as usize;
    let meta_len = read_u32(bytes, 13) as usize;

    let body_start = HEADER_LEN + meta_len;
    let needed = n
        .checked_mul(dim)
        .and_then(|v| v.checked_mul(8))
        .and_then(|v| v.checked_add(body_start))
        .ok_or_else(|| DataError::ShapeMismatch(format!("{n} x {dim} overflows")))?;
    if bytes.len() < needed {
        return Err(DataError::TruncatedFile { needed, found: bytes.len() });
    }
    if bytes.len() > needed {
        return Err(DataError::ShapeMismatch(format!(
            "{} trailing bytes after {n} records of dim {dim}",
            bytes.len() - needed
        )));
    }
    let meta: EmbeddingMeta = serde_json::from_slice(&bytes[HEADER_LEN..body_start])
        .map_err(|e| DataError::Metadata(e.to_string()))?;

    let mut s1 = Vec::with_capacity(n * dim);
    let mut s2 = Vec::with_capacity(n * dim);
    let floats = bytes[body_start..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")));
    for (i, v) in floats.enumerate() {
        if (i / dim).is_multiple_of(2) {
            s1.push(v);
        } else {
            s2.push(v);
        }
    }
    EmbeddingPairSet::new(meta, dim, s1, s2).map_err(|e| DataError::ShapeMismatch(e.to_string()))
}

pub fn write_ldse(path: &Path, set: &EmbeddingPairSet) -> Result<(), DataError> {
    let bytes = encode_ldse(set)?;
    std::fs::write(path, bytes).map_err(|e| DataError::io(path, e))
}

pub fn read_ldse(path: &Path) -> Result<EmbeddingPairSet, DataError> {
    let bytes = std::fs::read(path).map_err(|e| DataError::io(path, e))?;
    decode_ldse(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EmbeddingPairSet {
        let s1: Vec<f32> = (0..12).map(|i| i as f32 * 0.25 - 1.0).collect();
        let s2: Vec<f32> = (0..12).map(|i| (i as f32).sin()).collect();
        EmbeddingPairSet::new(EmbeddingMeta::new("bert-base", "tense"), 4, s1, s2).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = encode_ldse(&small()).unwrap();
        assert_eq!(&bytes[..4], b"LDSE");
        assert_eq!(bytes[4], 1);
        assert_eq!(read_u32(&bytes, 5), 3);
        assert_eq!(read_u32(&bytes, 9), 4);
        let meta_len = read_u32(&bytes, 13) as usize;
        let meta: serde_json::Value = serde_json::from_slice(&bytes[17..17 + meta_len]).unwrap();
        for key in ["model_tag", "property", "source_hash", "pooling", "layer"] {
            assert!(meta.get(key).is_some(), "{key}");
        }
        assert_eq!(bytes.len(), 17 + meta_len + 3 * 4 * 2 * 4);
        // first record starts with s1 row 0
        let first = f32::from_le_bytes(bytes[17 + meta_len..21 + meta_len].try_into().unwrap());
        assert_eq!(first, -1.0);
    }

    #[test]
    fn round_trip() {
        let set = small();
        assert_eq!(decode_ldse(&encode_ldse(&set).unwrap()).unwrap(), set);
    }

    #[test]
    fn corruption_errors() {
        let bytes = encode_ldse(&small()).unwrap();
        assert!(matches!(decode_ldse(&bytes[..bytes.len() - 3]), Err(DataError::TruncatedFile { .. })));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_ldse(&bad), Err(DataError::BadMagic)));
        let mut v2 = bytes.clone();
        v2[4] = 0x02;
        assert!(matches!(decode_ldse(&v2), Err(DataError::UnsupportedVersion(2))));
        let mut long = bytes;
        long.push(0);
        assert!(matches!(decode_ldse(&long), Err(DataError::ShapeMismatch(_))));
    }
}
