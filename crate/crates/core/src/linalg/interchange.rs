//! Plain-text matrix interchange format.
//!
//! ```text
//! complex-matrix <rows> <cols>
//! <re> <im>        (rows*cols lines, row-major)
//! ```
//!
//! Values are written with 17 significant digits so a write/read cycle is
//! lossless.

use std::io::Write;

use num_complex::Complex64;

use super::matrix::MatrixAoS;
use crate::error::{Error, Result};

pub const HEADER: &str = "complex-matrix";

pub fn write_matrix<W: Write>(m: &MatrixAoS, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{HEADER} {} {}", m.rows(), m.cols())?;
    for z in m.as_slice() {
        writeln!(out, "{:.16e} {:.16e}", z.re, z.im)?;
    }
    Ok(())
}

pub fn format_matrix(m: &MatrixAoS) -> String {
    let mut buf = Vec::new();
    write_matrix(m, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

pub fn parse_matrix(text: &str) -> Result<MatrixAoS> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty matrix text"))?;
    let (rows, cols) = parse_header(header, line_no)?;
    let m = read_body(rows, cols, &mut lines, line_no)?;
    if let Some((n, _)) = lines.next() {
        return Err(Error::parse(n, "trailing content after matrix"));
    }
    Ok(m)
}

/// Parses `complex-matrix <rows> <cols>`.
pub(crate) fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(HEADER) {
        return Err(Error::parse(
            line_no,
            format!("expected `{HEADER} <rows> <cols>`"),
        ));
    }
    let mut dim = |what: &str| -> Result<usize> {
        parts
            .next()
            .ok_or_else(|| Error::parse(line_no, format!("missing {what}")))?
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid {what}")))
    };
    let rows = dim("row count")?;
    let cols = dim("column count")?;
    if parts.next().is_some() {
        return Err(Error::parse(line_no, "unexpected token after header"));
    }
    Ok((rows, cols))
}

/// Reads `rows*cols` element lines from `lines`; `header_line` is used for
/// the error when the input ends early.
pub(crate) fn read_body<'a>(
    rows: usize,
    cols: usize,
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    header_line: usize,
) -> Result<MatrixAoS> {
    let n = rows * cols;
    let mut data = Vec::with_capacity(n);
    for k in 0..n {
        let (line_no, line) = lines.next().ok_or_else(|| {
            Error::parse(
                header_line,
                format!("matrix ended after {k} of {n} elements"),
            )
        })?;
        data.push(parse_element(line, line_no)?);
    }
    MatrixAoS::from_row_major(rows, cols, &data)
}

fn parse_element(line: &str, line_no: usize) -> Result<Complex64> {
    let mut parts = line.split_whitespace();
    let mut num = |what: &str| -> Result<f64> {
        let tok = parts
            .next()
            .ok_or_else(|| Error::parse(line_no, format!("missing {what} part")))?;
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid number `{tok}`")))?;
        if !v.is_finite() {
            return Err(Error::parse(line_no, "non-finite matrix entry"));
        }
        Ok(v)
    };
    let re = num("real")?;
    let im = num("imaginary")?;
    if parts.next().is_some() {
        return Err(Error::parse(line_no, "expected exactly two numbers"));
    }
    Ok(Complex64::new(re, im))
}
