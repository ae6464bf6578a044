//! Matrix files. JSON is `{"two_j", "two_sigma", "rows", "entries"}` with
//! row-major `[re, im]` pairs; CSV is `row,col,re,im` with 0-based indices.
//! Every float is written with 17 significant digits so re-import is
//! bit-exact, and the output depends only on the matrix.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format `{s}` (json | csv)"))),
        }
    }
}

/// An exported matrix with its labels; `two_sigma` is informational.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub two_sigma: i32,
    pub matrix: OperatorMatrix,
}

fn num(x: f64) -> String {
    if x == 0.0 && x.is_sign_positive() {
        "0".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn to_json(file: &MatrixFile) -> String {
    let m = file.matrix.entries();
    let mut s = format!(
        "{{\"two_j\": {}, \"two_sigma\": {}, \"rows\": {}, \"entries\": [",
        file.matrix.two_j(),
        file.two_sigma,
        m.nrows()
    );
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if r + c > 0 {
                s.push_str(", ");
            }
            let z = m[(r, c)];
            s.push_str(&format!("[{}, {}]", num(z.re), num(z.im)));
        }
    }
    s.push_str("]}\n");
    s
}

#[derive(Deserialize)]
struct JsonMatrix {
    two_j: u32,
    two_sigma: i32,
    rows: usize,
    entries: Vec<[f64; 2]>,
}

pub fn from_json(text: &str) -> Result<MatrixFile> {
    let raw: JsonMatrix = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let dim = raw.two_j as usize + 1;
    if raw.rows != dim || raw.entries.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: raw.entries.len(),
        });
    }
    let entries = DMatrix::from_row_iterator(dim, dim, raw.entries.iter().map(|[re, im]| Complex::new(*re, *im)));
    Ok(MatrixFile {
        two_sigma: raw.two_sigma,
        matrix: OperatorMatrix::new(raw.two_j, entries)?,
    })
}

pub fn to_csv(matrix: &OperatorMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["row", "col", "re", "im"]).map_err(csv_err)?;
    let m = matrix.entries();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            w.write_record([r.to_string(), c.to_string(), num(z.re), num(z.im)])
                .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn from_csv<R: Read>(reader: R) -> Result<OperatorMatrix> {
    let mut rd = csv::Reader::from_reader(reader);
    let header = rd.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["row", "col", "re", "im"] {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let mut cells = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse(format!("short record {rec:?}")));
        let idx = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s}: {e}")));
        let val = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s}: {e}")));
        cells.push((idx(field(0)?)?, idx(field(1)?)?, Complex::new(val(field(2)?)?, val(field(3)?)?)));
    }
    let dim = (cells.len() as f64).sqrt().round() as usize;
    if dim == 0 || dim * dim != cells.len() {
        return Err(Error::Parse(format!("{} cells do not form a square matrix", cells.len())));
    }
    let mut m = DMatrix::zeros(dim, dim);
    let mut seen = vec![false; dim * dim];
    for (r, c, z) in cells {
        if r >= dim || c >= dim || seen[r * dim + c] {
            return Err(Error::Parse(format!("bad or repeated cell ({r}, {c})")));
        }
        seen[r * dim + c] = true;
        m[(r, c)] = z;
    }
    OperatorMatrix::new(dim as u32 - 1, m)
}

pub fn write_matrix(path: &Path, file: &MatrixFile, format: Format) -> Result<()> {
    let text = match format {
        Format::Json => to_json(file),
        Format::Csv => to_csv(&file.matrix)?,
    };
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Reads either format; CSV carries no σ, so `two_sigma` comes back as 0.
pub fn read_matrix(path: &Path, format: Format) -> Result<MatrixFile> {
    match format {
        Format::Json => from_json(&fs::read_to_string(path)?),
        Format::Csv => Ok(MatrixFile {
            two_sigma: 0,
            matrix: from_csv(fs::File::open(path)?)?,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(m: &OperatorMatrix) -> Vec<(u64, u64)> {
        m.entries().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
    }

    #[test]
    fn identity_json() {
        let f = MatrixFile {
            two_sigma: 0,
            matrix: OperatorMatrix::identity(2),
        };
        let s = to_json(&f);
        assert!(s.starts_with("{\"two_j\": 2, \"two_sigma\": 0, \"rows\": 3, \"entries\": [[1.0000000000000000e0, 0], [0, 0]"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["entries"].as_array().unwrap().len(), 9);
        assert_eq!(v["entries"][4][0].as_f64(), Some(1.0));
        assert_eq!(from_json(&s).unwrap().matrix.entries(), f.matrix.entries());
    }

    #[test]
    fn csv_layout() {
        let m = OperatorMatrix::identity(3);
        let s = to_csv(&m).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "row,col,re,im");
        assert_eq!(lines.len(), 1 + 16);
        assert_eq!(lines[1], "0,0,1.0000000000000000e0,0");
        assert_eq!(bits(&from_csv(s.as_bytes()).unwrap()), bits(&m));
    }

    #[test]
    fn rejects_malformed() {
        assert!(from_json("{\"two_j\": 1, \"two_sigma\": 1, \"rows\": 2, \"entries\": [[1, 0]]}").is_err());
        assert!(from_csv("row,col,re,im\n0,0,1,0\n0,1,1,0\n".as_bytes()).is_err());
        assert!(from_csv("a,b,c,d\n0,0,1,0\n".as_bytes()).is_err());
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    fn negative_zero_survives() {
        let mut m = DMatrix::zeros(1, 1);
        m[(0, 0)] = Complex::new(-0.0, 0.0);
        let op = OperatorMatrix::new(0, m).unwrap();
        let back = from_csv(to_csv(&op).unwrap().as_bytes()).unwrap();
        assert_eq!(bits(&back), bits(&op));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(two_j in 0u32..5, seed in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 50)) {
            let d = two_j as usize + 1;
            let entries = DMatrix::from_fn(d, d, |r, c| Complex::new(seed[(r * d + c) % 50], seed[(r * d + c + 7) % 50]));
            let file = MatrixFile { two_sigma: -1, matrix: OperatorMatrix::new(two_j, entries).unwrap() };
            let json = from_json(&to_json(&file)).unwrap();
            prop_assert_eq!(bits(&json.matrix), bits(&file.matrix));
            prop_assert_eq!(json.two_sigma, -1);
            let csv = from_csv(to_csv(&file.matrix).unwrap().as_bytes()).unwrap();
            prop_assert_eq!(bits(&csv), bits(&file.matrix));
        }
    }
}
