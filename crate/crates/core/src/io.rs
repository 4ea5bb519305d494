//! JSON generator schema and report/CSV serialization helpers.
//!
//! Complex matrices serialize as nested arrays of `[re, im]` pairs so the
//! files stay readable and language-neutral.

use crate::lindblad::{LindbladError, LindbladGenerator};
use crate::numerics::{CMat, C64};
use faer::Mat;
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("ParseError at byte {offset} (line {line}, column {column}): {message}")]
    Parse {
        message: String,
        offset: usize,
        line: usize,
        column: usize,
    },
    #[error("matrix is not rectangular: row {row} has {got} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("dimension mismatch: declared dim {declared}, {what} is {rows}x{cols}")]
    DimensionMismatch {
        declared: usize,
        what: String,
        rows: usize,
        cols: usize,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("lindblad: {0}")]
    Lindblad(#[from] LindbladError),
}

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<CMat, IoError> {
    let rows = j.len();
    let cols = j.first().map_or(0, |r| r.len());
    for (i, row) in j.iter().enumerate() {
        if row.len() != cols {
            return Err(IoError::RaggedMatrix {
                row: i,
                got: row.len(),
                expected: cols,
            });
        }
    }
    Ok(Mat::from_fn(rows, cols, |i, j_| {
        C64::new(j[i][j_][0], j[i][j_][1])
    }))
}

/// On-disk generator description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSchema {
    pub dim: usize,
    pub hamiltonian: MatrixJson,
    pub lindblad_ops: Vec<MatrixJson>,
}

impl GeneratorSchema {
    pub fn from_generator(gen: &LindbladGenerator) -> Self {
        Self {
            dim: gen.dim(),
            hamiltonian: matrix_to_json(gen.hamiltonian()),
            lindblad_ops: gen.lindblad_ops().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn into_generator(self) -> Result<LindbladGenerator, IoError> {
        let h = matrix_from_json(&self.hamiltonian)?;
        if h.nrows() != self.dim || h.ncols() != self.dim {
            return Err(IoError::DimensionMismatch {
                declared: self.dim,
                what: "hamiltonian".into(),
                rows: h.nrows(),
                cols: h.ncols(),
            });
        }
        let mut ops = Vec::with_capacity(self.lindblad_ops.len());
        for (k, m) in self.lindblad_ops.iter().enumerate() {
            let op = matrix_from_json(m)?;
            if op.nrows() != self.dim || op.ncols() != self.dim {
                return Err(IoError::DimensionMismatch {
                    declared: self.dim,
                    what: format!("lindblad_ops[{k}]"),
                    rows: op.nrows(),
                    cols: op.ncols(),
                });
            }
            ops.push(op);
        }
        Ok(LindbladGenerator::new(h, ops)?)
    }
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    // serde_json reports 1-based line/column
    let mut offset = 0;
    for (i, l) in text.split('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1);
        }
        offset += l.len() + 1;
    }
    offset
}

pub fn parse_generator(text: &str) -> Result<LindbladGenerator, IoError> {
    let schema: GeneratorSchema =
        serde_json::from_str(text).map_err(|e| IoError::Parse {
            message: e.to_string(),
            offset: byte_offset(text, e.line(), e.column()),
            line: e.line(),
            column: e.column(),
        })?;
    schema.into_generator()
}

pub fn load_generator(path: &std::path::Path) -> Result<LindbladGenerator, IoError> {
    parse_generator(&std::fs::read_to_string(path)?)
}

pub fn save_generator(gen: &LindbladGenerator, path: &std::path::Path) -> Result<(), IoError> {
    let schema = GeneratorSchema::from_generator(gen);
    Ok(std::fs::write(path, serde_json::to_string_pretty(&schema).expect("schema serializes"))?)
}

/// Machine-readable error object for the CLI.
#[derive(Debug, Serialize)]
pub struct ErrorObject {
    pub schema_version: u32,
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub byte_offset: Option<usize>,
}

impl ErrorObject {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            error: kind.to_string(),
            message: message.into(),
            byte_offset: None,
        }
    }

    pub fn from_io_error(err: &IoError) -> Self {
        let mut obj = Self::new(
            match err {
                IoError::Parse { .. } => "ParseError",
                IoError::RaggedMatrix { .. } | IoError::DimensionMismatch { .. } => {
                    "StructureError"
                }
                IoError::Io(_) => "IoError",
                IoError::Lindblad(_) => "GeneratorError",
            },
            err.to_string(),
        );
        if let IoError::Parse { offset, .. } = err {
            obj.byte_offset = Some(*offset);
        }
        obj
    }
}

/// Writes plot-ready CSV with 17 significant digits so downstream plots are
/// bit-reproducible.
pub fn write_csv<W: Write>(
    mut w: W,
    header: &[&str],
    rows: &[Vec<f64>],
) -> Result<(), IoError> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}
