//! File formats: JSON with 17-significant-digit floats, matrices as rows of
//! `[re, im]` pairs.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::harness::ensemble::{EnsembleKind, StatePair};
use crate::operator::HermitianOperator;
use crate::scalar::CMatrix;

/// Decimal form with 17 significant digits; parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not a number: '{s}'")))
}

/// Pretty JSON formatter that writes every float as [`fmt_f64`].
struct ExactFloats<'a>(PrettyFormatter<'a>);

macro_rules! forward {
    ($($name:ident),*) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
                self.0.$name(w)
            }
        )*
    };
}

impl Formatter for ExactFloats<'_> {
    forward!(begin_array, end_array, begin_object, end_object, end_array_value, begin_object_value, end_object_value);

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_json_string<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<S: Serialize + ?Sized>(value: &S, path: &Path) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Row-major matrix of `[re, im]` entries.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix<f64>) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix<f64>> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if n == 0 || cols == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
        return Err(Error::Parse(format!("row {bad} has {} entries, expected {cols}", rows[bad].len())));
    }
    Ok(DMatrix::from_fn(n, cols, |i, j| Complex::new(rows[i][j][0], rows[i][j][1])))
}

pub fn operator_from_json(rows: &MatrixJson) -> Result<HermitianOperator<f64>> {
    HermitianOperator::new(matrix_from_json(rows)?)
}

pub fn read_operator(path: &Path) -> Result<HermitianOperator<f64>> {
    operator_from_json(&read_json(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairJson {
    pub rho1: MatrixJson,
    pub rho2: MatrixJson,
}

impl PairJson {
    pub fn from_pair(pair: &StatePair) -> Self {
        Self {
            rho1: matrix_to_json(pair.0.matrix()),
            rho2: matrix_to_json(pair.1.matrix()),
        }
    }

    pub fn to_pair(&self) -> Result<StatePair> {
        Ok((operator_from_json(&self.rho1)?, operator_from_json(&self.rho2)?))
    }
}

/// Output of the `sample` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairsFile {
    pub kind: EnsembleKind,
    pub seed: u64,
    pub measure: String,
    pub pairs: Vec<PairJson>,
}

/// Reads either a single `{"rho1", "rho2"}` object or a pairs file, in which
/// case pair `index` is taken.
pub fn read_pair(path: &Path, index: usize) -> Result<StatePair> {
    let value: serde_json::Value = read_json(path)?;
    let pair: PairJson = if value.get("pairs").is_some() {
        let file: PairsFile = serde_json::from_value(value)?;
        file.pairs
            .into_iter()
            .nth(index)
            .ok_or_else(|| Error::InvalidArgument(format!("pair index {index} out of range")))?
    } else {
        serde_json::from_value(value)?
    };
    pair.to_pair()
}
