use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::GridRow;
use crate::error::{Error, Result};
use crate::pinch::Identity;
use crate::scalar::{format_rational, parse_rational, Scalar};

pub const CSV_HEADER: [&str; 13] = [
    "identity", "x", "h", "H", "Q", "N", "lhs_re", "lhs_im", "main_re", "main_im", "rem_re",
    "rem_im", "norm_rem",
];

/// One grid row as written to CSV: rationals as `num/den`, absent
/// parameters as empty cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub identity: Identity,
    pub x: Option<u64>,
    pub h: u64,
    #[serde(rename = "H")]
    pub shifts: u64,
    #[serde(rename = "Q")]
    pub range: Option<u64>,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub lhs_re: String,
    pub lhs_im: String,
    pub main_re: String,
    pub main_im: String,
    pub rem_re: String,
    pub rem_im: String,
    pub norm_rem: String,
}

fn scalar(re: &str, im: &str) -> Result<Scalar> {
    Ok(Scalar::new(parse_rational(re)?, parse_rational(im)?))
}

impl CsvRow {
    pub fn from_row(row: &GridRow) -> Self {
        let r = &row.report;
        Self {
            identity: r.identity,
            x: r.tuple.x,
            h: r.tuple.h,
            shifts: r.tuple.shifts,
            range: r.tuple.range,
            n: r.tuple.n,
            lhs_re: format_rational(&r.lhs.re),
            lhs_im: format_rational(&r.lhs.im),
            main_re: format_rational(&r.main.re),
            main_im: format_rational(&r.main.im),
            rem_re: format_rational(&r.remainder.re),
            rem_im: format_rational(&r.remainder.im),
            norm_rem: format_norm(row.normalized_remainder),
        }
    }

    pub fn lhs(&self) -> Result<Scalar> {
        scalar(&self.lhs_re, &self.lhs_im)
    }

    pub fn main(&self) -> Result<Scalar> {
        scalar(&self.main_re, &self.main_im)
    }

    pub fn remainder(&self) -> Result<Scalar> {
        scalar(&self.rem_re, &self.rem_im)
    }

    /// `lhs == main + remainder` after re-parsing.
    pub fn is_exact(&self) -> Result<bool> {
        Ok(self.lhs()? == self.main()? + self.remainder()?)
    }
}

/// A non-negative real with 6 significant digits: fixed notation for
/// exponents in `[-5, 6)`, scientific otherwise.
pub fn format_norm(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).expect("exponent");
    if (-5..6).contains(&exp) {
        format!("{v:.*}", (5 - exp) as usize)
    } else {
        sci
    }
}

pub fn write_grid_csv<W: Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.serialize(CsvRow::from_row(row)).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}
