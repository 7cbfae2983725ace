//! Operator files and number formatting.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use shnr_core::{CMatrix, C64};

use crate::error::CliError;

/// Dense complex matrix as `{"rows", "cols", "data": [[re, im], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixJson { rows: m.rows(), cols: m.cols(), data: m.as_slice().iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn to_matrix(&self, name: &str) -> Result<CMatrix, CliError> {
        if self.data.len() != self.rows * self.cols {
            return Err(CliError::input(format!(
                "{name}: {} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        if self.rows != self.cols || self.rows == 0 {
            return Err(CliError::input(format!(
                "{name}: expected a nonempty square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::input(format!("{name}: non-finite entry")));
        }
        let data = self.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Ok(CMatrix::from_vec(self.rows, self.cols, data)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "T")]
    pub t: MatrixJson,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<MatrixJson>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<MatrixJson>,
}

/// Parsed and shape-checked contents of an [`OperatorFile`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operators {
    pub a: CMatrix,
    pub t: CMatrix,
    pub s: Option<CMatrix>,
    pub r: Option<CMatrix>,
}

impl OperatorFile {
    pub fn from_operators(ops: &Operators) -> Self {
        OperatorFile {
            a: MatrixJson::from_matrix(&ops.a),
            t: MatrixJson::from_matrix(&ops.t),
            s: ops.s.as_ref().map(MatrixJson::from_matrix),
            r: ops.r.as_ref().map(MatrixJson::from_matrix),
        }
    }

    pub fn into_operators(self) -> Result<Operators, CliError> {
        let a = self.a.to_matrix("A")?;
        let n = a.rows();
        let check = |m: &MatrixJson, name: &str| -> Result<CMatrix, CliError> {
            let m = m.to_matrix(name)?;
            if m.rows() != n {
                return Err(CliError::input(format!("{name} is {0}x{0} but A is {n}x{n}", m.rows())));
            }
            Ok(m)
        };
        Ok(Operators {
            t: check(&self.t, "T")?,
            s: self.s.as_ref().map(|m| check(m, "S")).transpose()?,
            r: self.r.as_ref().map(|m| check(m, "R")).transpose()?,
            a,
        })
    }
}

pub fn parse_operator_file(text: &str) -> Result<Operators, CliError> {
    let file: OperatorFile = serde_json::from_str(text).map_err(|e| CliError::input(format!("operator file: {e}")))?;
    file.into_operators()
}

pub fn read_operator_file(path: &Path) -> Result<Operators, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    parse_operator_file(&text)
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place, so a failed run never leaves a partial file behind.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// 15 significant digits, fixed notation where that stays readable.
pub fn format_scalar(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        format!("{:.*}", (14 - exp).max(0) as usize, x)
    } else {
        format!("{x:.14e}")
    }
}
