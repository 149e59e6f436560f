//! CSV matrix files.
//!
//! One matrix row per line, comma separated. Missing entries are the literal
//! token `NA`. An optional header line is skipped when requested.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::{
    usvt_estimate, EstimateDiagnostics, EstimatorConfig, Mask, MaskedMatrix,
};
use crate::linalg::DenseMatrix;

/// Token for a missing entry.
pub const MISSING: &str = "NA";

/// A parsed matrix file: values (0.0 where missing) and the observation mask.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub values: DenseMatrix,
    pub mask: Mask,
}

impl MatrixFile {
    pub fn is_fully_observed(&self) -> bool {
        self.mask.count() == self.values.len()
    }
}

/// Parses CSV text; `header` skips the first record.
pub fn read_matrix<R: Read>(reader: R, header: bool) -> Result<MatrixFile> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse { line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        for field in record.iter() {
            if field == MISSING {
                row.push(None);
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { line, message: format!("non-finite value {field:?}") });
            }
            row.push(Some(v));
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 0, message: "no data rows".into() });
    }
    let (r, c) = (rows.len(), rows[0].len());
    let values = DenseMatrix::from_fn(r, c, |i, j| rows[i][j].unwrap_or(0.0));
    let mask = Mask::from_fn(r, c, |i, j| rows[i][j].is_some());
    Ok(MatrixFile { values, mask })
}

pub fn read_matrix_path(path: &Path, header: bool) -> Result<MatrixFile> {
    read_matrix(File::open(path)?, header)
}

/// Writes a matrix with shortest round-trip formatting; masked-out entries
/// become `NA` when a mask is given.
pub fn write_matrix<W: Write>(writer: W, m: &DenseMatrix, mask: Option<&Mask>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().from_writer(writer);
    for i in 0..m.rows() {
        let record: Vec<String> = (0..m.cols())
            .map(|j| match mask {
                Some(mask) if !mask.get(i, j) => MISSING.to_string(),
                _ => format!("{:?}", m.get(i, j)),
            })
            .collect();
        wtr.write_record(&record).map_err(csv_io)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_matrix_path(path: &Path, m: &DenseMatrix, mask: Option<&Mask>) -> Result<()> {
    write_matrix(BufWriter::new(File::create(path)?), m, mask)
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("{other:?}")),
    }
}

/// Reads `input`, runs the estimator and writes the estimate to `output`
/// and its diagnostics to `diagnostics` as JSON.
pub fn estimate_file(
    input: &Path,
    header: bool,
    config: &EstimatorConfig,
    output: &Path,
    diagnostics: &Path,
) -> Result<EstimateDiagnostics> {
    let file = read_matrix_path(input, header)?;
    let data = MaskedMatrix::new(file.values, file.mask, config.mode())?;
    let report = usvt_estimate(&data, config)?;
    write_matrix_path(output, &report.estimate, None)?;
    let diag = report.diagnostics();
    let mut out = BufWriter::new(File::create(diagnostics)?);
    serde_json::to_writer_pretty(&mut out, &diag)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_missing_and_header() {
        let text = "a,b,c\n1,NA,3\n-0.5, 2 ,NA\n";
        let f = read_matrix(text.as_bytes(), true).unwrap();
        assert_eq!(f.values.shape(), (2, 3));
        assert_eq!(f.mask.count(), 4);
        assert!(!f.mask.get(0, 1));
        assert_eq!(f.values.get(1, 1), 2.0);
    }

    #[test]
    fn parse_error_names_line() {
        let err = read_matrix("1,2\n3,x\n".as_bytes(), false).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = read_matrix("1,2\n3\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(read_matrix("".as_bytes(), false).is_err());
        assert!(read_matrix("1,inf\n".as_bytes(), false).is_err());
    }

    #[test]
    fn write_then_read_is_exact() {
        let m = DenseMatrix::from_rows(&[vec![0.1, -1e-300], vec![1.0 / 3.0, 12345.678]]).unwrap();
        let mut mask = Mask::filled(2, 2, true);
        mask.set(1, 0, false);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m, Some(&mask)).unwrap();
        let back = read_matrix(buf.as_slice(), false).unwrap();
        assert_eq!(back.mask, mask);
        assert_eq!(back.values.get(0, 1), -1e-300);
        assert_eq!(back.values.get(1, 1), 12345.678);
    }
}
