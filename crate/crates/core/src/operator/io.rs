//! Matrix files.
//!
//! Binary layout (little-endian): magic `SPBD`, `u32` version (= 1),
//! `u64` rows, `u64` cols, then `rows * cols` row-major `f64` values.
//! CSV: one row per line, comma-separated, no header.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

const MAGIC: &[u8; 4] = b"SPBD";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Csv,
    Binary,
}

impl MatrixFormat {
    /// `.csv` means CSV; anything else is the binary format.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Binary,
        }
    }
}

pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<DenseMatrix> {
    match format {
        MatrixFormat::Csv => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_csv(path, &text)
        }
        MatrixFormat::Binary => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            parse_binary(path, &bytes)
        }
    }
}

pub fn save_matrix(m: &DenseMatrix, path: &Path, format: MatrixFormat) -> Result<()> {
    let bytes = match format {
        MatrixFormat::Csv => {
            let mut s = String::new();
            for i in 0..m.rows() {
                let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:?}")).collect();
                s.push_str(&row.join(","));
                s.push('\n');
            }
            s.into_bytes()
        }
        MatrixFormat::Binary => {
            let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.data().len());
            out.extend_from_slice(MAGIC);
            out.extend_from_slice(&VERSION.to_le_bytes());
            out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
            out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
            for v in m.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out
        }
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn parse_csv(path: &Path, text: &str) -> Result<DenseMatrix> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut n = 0;
        for tok in line.split(',') {
            let tok = tok.trim();
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                message: format!("line {}: cannot parse `{tok}` as a number", lineno + 1),
            })?;
            data.push(v);
            n += 1;
        }
        match cols {
            None => cols = Some(n),
            Some(c) if c != n => {
                return Err(Error::ShapeMismatch {
                    path: path.to_path_buf(),
                    message: format!("line {} has {n} entries, expected {c}", lineno + 1),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        message: "empty file".into(),
    })?;
    DenseMatrix::new(rows, cols, data)
}

fn parse_binary(path: &Path, bytes: &[u8]) -> Result<DenseMatrix> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < HEADER_LEN {
        return Err(parse_err(format!("file is {} bytes, shorter than the header", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(parse_err("bad magic, expected SPBD".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(parse_err(format!("unsupported version {version}")));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| parse_err(format!("header shape {rows}x{cols} overflows")))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != expected {
        return Err(Error::ShapeMismatch {
            path: path.to_path_buf(),
            message: format!(
                "header declares {rows}x{cols} ({expected} bytes) but payload has {} bytes",
                payload.len()
            ),
        });
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::new(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn p() -> PathBuf {
        PathBuf::from("mem.csv")
    }

    #[test]
    fn csv_identity() {
        let m = parse_csv(&p(), "1,0\n0,1").unwrap();
        assert_eq!(m, DenseMatrix::identity(2));
    }

    #[test]
    fn csv_nan_is_non_finite() {
        assert!(matches!(
            parse_csv(&p(), "1,nan\n0,1"),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn csv_garbage_is_parse_error() {
        assert!(matches!(parse_csv(&p(), "1,x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn csv_ragged_is_shape_error() {
        assert!(matches!(
            parse_csv(&p(), "1,2\n3"),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn binary_truncated_payload() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&1u32.to_le_bytes());
        bytes.extend_from_slice(&2u64.to_le_bytes());
        bytes.extend_from_slice(&2u64.to_le_bytes());
        bytes.extend_from_slice(&1.0f64.to_le_bytes());
        assert!(matches!(
            parse_binary(&p(), &bytes),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            parse_binary(&p(), b"NOPE0000"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(MatrixFormat::from_path(Path::new("a.CSV")), MatrixFormat::Csv);
        assert_eq!(MatrixFormat::from_path(Path::new("a.spbd")), MatrixFormat::Binary);
    }
}
