//! Delimited data files. Rows are observations and columns variables
//! unless `--transpose` is given; the returned matrix always has variables
//! in rows.

use std::io::Read;
use std::path::Path;

use rmt_infer::Matrix;

use crate::args::DataFormat;
use crate::error::CliError;

pub fn read_matrix(path: &Path, format: &DataFormat) -> Result<Matrix, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(file, format).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_matrix<R: Read>(input: R, format: &DataFormat) -> Result<Matrix, CliError> {
    if !format.delimiter.is_ascii() {
        return Err(CliError::Usage(format!(
            "delimiter {:?} must be a single ASCII character",
            format.delimiter
        )));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(format.header)
        .delimiter(format.delimiter as u8)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut cells = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let line = i + 1 + usize::from(format.header);
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { .. } => {
                CliError::Data(format!("line {line}: rows have different lengths"))
            }
            _ => CliError::Data(format!("line {line}: {e}")),
        })?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if *width.get_or_insert(record.len()) != record.len() {
            return Err(CliError::Data(format!("line {line}: rows have different lengths")));
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Data(format!("line {line}, column {}: {field:?} is not a number", j + 1))
            })?;
            if !v.is_finite() {
                return Err(CliError::Data(format!(
                    "line {line}, column {}: {field:?} is not finite",
                    j + 1
                )));
            }
            cells.push(v);
        }
        rows += 1;
    }
    let cols = width.unwrap_or(0);
    let m = Matrix::from_row_major(rows, cols, cells).map_err(|e| CliError::Data(e.to_string()))?;
    let x = if format.transpose { m } else { m.transpose() };
    if x.cols() < 2 || x.rows() < 1 {
        return Err(CliError::Data(format!(
            "need at least one variable and two observations, found {} x {}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fmt(transpose: bool) -> DataFormat {
        DataFormat {
            transpose,
            header: false,
            delimiter: ',',
        }
    }

    fn write(m: &Matrix) -> String {
        let mut out = String::new();
        for i in 0..m.rows() {
            let row: Vec<String> = m.row(i).iter().map(|v| crate::output::fmt_f64(*v)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    #[test]
    fn transpose_round_trip_is_exact() {
        let m = Matrix::from_fn(3, 5, |i, j| (i as f64 + 0.1).powf(j as f64 - 1.7) / 3.0);
        let text = write(&m.transpose());
        let back = parse_matrix(text.as_bytes(), &fmt(true)).unwrap();
        assert_eq!(back.transpose().as_slice(), m.as_slice());
        let back = parse_matrix(text.as_bytes(), &fmt(false)).unwrap();
        assert_eq!(back.as_slice(), m.as_slice());
    }

    #[test]
    fn headers_and_delimiters() {
        let text = "a; b\n1; 2\n3; 4\n5; 6\n";
        let f = DataFormat {
            transpose: false,
            header: true,
            delimiter: ';',
        };
        let x = parse_matrix(text.as_bytes(), &f).unwrap();
        assert_eq!((x.rows(), x.cols()), (2, 3));
        assert_eq!(x.row(1), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn malformed_files_are_rejected() {
        for bad in ["1,2\n3\n", "1,x\n2,3\n", "1,inf\n2,3\n", "1,2\n", ""] {
            let e = parse_matrix(bad.as_bytes(), &fmt(false)).unwrap_err();
            assert_eq!(e.code(), "data", "{bad:?}");
        }
    }
}
