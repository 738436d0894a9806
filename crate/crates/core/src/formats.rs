//! JSON documents read and written by the command-line tools.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::norms::MatrixMeasure;

pub const MEASURE_FORMAT_VERSION: u32 = 1;

/// `{ "version": 1, "p": .., "m": .., "coeffs": [ row-major [re, im] lists ] }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDocument {
    pub version: u32,
    pub p: usize,
    pub m: usize,
    pub coeffs: Vec<Vec<C64>>,
}

impl From<&MatrixMeasure> for MeasureDocument {
    fn from(mu: &MatrixMeasure) -> Self {
        MeasureDocument {
            version: MEASURE_FORMAT_VERSION,
            p: mu.p(),
            m: mu.m(),
            coeffs: mu.coeffs().iter().map(|c| c.as_slice().to_vec()).collect(),
        }
    }
}

impl TryFrom<MeasureDocument> for MatrixMeasure {
    type Error = Error;
    fn try_from(doc: MeasureDocument) -> Result<Self> {
        if doc.version != MEASURE_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported measure version {}, expected {MEASURE_FORMAT_VERSION}",
                doc.version
            )));
        }
        if doc.coeffs.len() != doc.m {
            return Err(Error::Format(format!(
                "{} coefficients listed, header says m = {}",
                doc.coeffs.len(),
                doc.m
            )));
        }
        let coeffs = doc
            .coeffs
            .into_iter()
            .map(|c| ComplexMatrix::new(doc.p, doc.p, c))
            .collect::<Result<Vec<_>>>()?;
        MatrixMeasure::new(coeffs)
    }
}

pub fn measure_to_json(mu: &MatrixMeasure) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MeasureDocument::from(mu))?)
}

pub fn measure_from_json(text: &str) -> Result<MatrixMeasure> {
    serde_json::from_str::<MeasureDocument>(text)?.try_into()
}

/// Matrix files are `{ "rows": r, "cols": c, "entries": [[re, im], ...] }`.
pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    Ok(serde_json::from_str(text)?)
}

pub fn matrix_to_json(a: &ComplexMatrix) -> Result<String> {
    Ok(serde_json::to_string(a)?)
}
