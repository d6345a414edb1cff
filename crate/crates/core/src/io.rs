//! JSON encodings of polynomials, pairs, solvents, bisolvents and factors.
//!
//! Matrices are lists of rows, each entry a `[re, im]` pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_finite, zeros, ComplexMatrix, C64};
use crate::poly::MatrixPolynomial;

/// Row-major matrix with complex entries as `[re, im]`.
pub type MatrixData = Vec<Vec<[f64; 2]>>;

pub fn encode_matrix(m: &ComplexMatrix) -> MatrixData {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn decode_matrix(data: &MatrixData, what: &str) -> Result<ComplexMatrix> {
    let rows = data.len();
    let cols = data.first().map_or(0, Vec::len);
    let mut m = zeros(rows, cols);
    for (r, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "{what}: row {r} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (c, [re, im]) in row.iter().enumerate() {
            m[(r, c)] = C64::new(*re, *im);
        }
    }
    if !is_finite(&m) {
        return Err(Error::Parse(format!("{what}: non-finite entry")));
    }
    Ok(m)
}

fn decode_sized(data: &MatrixData, rows: usize, cols: usize, what: &str) -> Result<ComplexMatrix> {
    if data.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "{what}: {} rows, expected {rows}",
            data.len()
        )));
    }
    if rows == 0 {
        return Ok(zeros(0, cols));
    }
    let m = decode_matrix(data, what)?;
    if m.ncols() != cols {
        return Err(Error::DimensionMismatch(format!(
            "{what}: {} columns, expected {cols}",
            m.ncols()
        )));
    }
    Ok(m)
}

/// On-disk form of `P(λ) = Σ A_i λⁱ`; `coefficients[i]` multiplies `λⁱ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFile {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub coefficients: Vec<MatrixData>,
}

impl PolynomialFile {
    pub fn from_polynomial(p: &MatrixPolynomial) -> Self {
        Self {
            n: p.rows(),
            m: p.cols(),
            k: p.degree(),
            coefficients: p.coeffs().iter().map(encode_matrix).collect(),
        }
    }

    pub fn to_polynomial(&self) -> Result<MatrixPolynomial> {
        if self.coefficients.len() != self.k + 1 {
            return Err(Error::DimensionMismatch(format!(
                "k = {} needs {} coefficients, found {}",
                self.k,
                self.k + 1,
                self.coefficients.len()
            )));
        }
        let coeffs = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, a)| decode_sized(a, self.n, self.m, &format!("coefficients[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        MatrixPolynomial::new(coeffs)
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
}

pub fn parse_polynomial_file(text: &str) -> Result<PolynomialFile> {
    serde_json::from_str(text).map_err(parse_error)
}

pub fn parse_polynomial(text: &str) -> Result<MatrixPolynomial> {
    parse_polynomial_file(text)?.to_polynomial()
}

pub fn polynomial_to_json(p: &MatrixPolynomial) -> String {
    serde_json::to_string_pretty(&PolynomialFile::from_polynomial(p)).expect("serializable")
}

/// Objects handed to the `verify` command, discriminated by `"kind"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CompanionFile {
    Pair {
        x: MatrixData,
        y: MatrixData,
        t: MatrixData,
        z: MatrixData,
    },
    Solvent {
        matrix: MatrixData,
        #[serde(default)]
        cosolvent: bool,
    },
    Bisolvent {
        s1: MatrixData,
        s2: MatrixData,
        pi: MatrixData,
    },
    /// `[A₀, A₁]` of the pencil `λA₁ + A₀`.
    Factor { coefficients: Vec<MatrixData> },
}

pub fn parse_companion(text: &str) -> Result<CompanionFile> {
    serde_json::from_str(text).map_err(parse_error)
}
