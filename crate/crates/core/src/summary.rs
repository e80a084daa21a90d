//! Reading published ANOVA summaries.
//!
//! The string grammar (whitespace between tokens is ignored):
//!
//! ```text
//! summary := "F" "(" int "," int ")" "=" real { "," clause }
//! clause  := "p" ("=" | "<" | ">") real
//!          | ("n" | "N") "=" int
//! real    := ["-"] (digits ["." [digits]] | "." digits) [("e" | "E") ["+" | "-"] digits]
//! ```
//!
//! Each clause may appear at most once. Only ASCII is accepted; a unicode
//! minus sign is a parse error. Error offsets count bytes from 1.

use std::fmt;
use std::io::Read;

use serde::{Serialize, Serializer};

use crate::bf::AnovaSummary;
pub use crate::bf::{Comparator, ReportedP};
use crate::error::{Error, Result};
use crate::special::f_upper_tail;

/// Default allowed gap between a reported and a recomputed p value; published
/// p values are usually rounded to two decimals.
pub const DEFAULT_P_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Warning {
    /// The reported p value disagrees with the one implied by F(df1, df2).
    PFMismatch,
    /// No sample size was given; it must be supplied before computing.
    NMissing,
    /// `n` is below `df2/df1 + 1`, smaller than any design with these
    /// degrees of freedom allows.
    NLtDfBound,
}

impl Warning {
    pub fn code(self) -> &'static str {
        match self {
            Warning::PFMismatch => "P_F_MISMATCH",
            Warning::NMissing => "N_MISSING",
            Warning::NLtDfBound => "N_LT_DF_BOUND",
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for Warning {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

/// A parsed summary string. `n` is optional in the text, so this is one step
/// short of an [`AnovaSummary`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportedSummary {
    pub f_value: f64,
    pub df1: u32,
    pub df2: u32,
    pub n: Option<u64>,
    pub reported_p: Option<ReportedP>,
}

impl ReportedSummary {
    /// Builds the full summary, taking `n` from the text or else from
    /// `fallback_n`.
    pub fn into_summary(self, fallback_n: Option<u64>) -> Result<AnovaSummary> {
        let n = self.n.or(fallback_n).ok_or_else(|| {
            Error::Validation(format!(
                "{}: sample size n is required",
                Warning::NMissing.code()
            ))
        })?;
        let summary = AnovaSummary::new(self.f_value, self.df1, self.df2, n)?;
        match self.reported_p {
            Some(p) => summary.with_reported_p(p),
            None => Ok(summary),
        }
    }

    pub fn warnings(&self, p_tolerance: f64) -> Vec<Warning> {
        let mut out = Vec::new();
        if let Some(p) = self.reported_p {
            if p_mismatch(self.f_value, self.df1, self.df2, p, p_tolerance) {
                out.push(Warning::PFMismatch);
            }
        }
        match self.n {
            None => out.push(Warning::NMissing),
            Some(n) if below_df_bound(n, self.df1, self.df2) => out.push(Warning::NLtDfBound),
            Some(_) => {}
        }
        out
    }
}

/// Canonical text form; parsing it yields an identical record.
impl fmt::Display for ReportedSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({},{})={}", self.df1, self.df2, self.f_value)?;
        if let Some(p) = self.reported_p {
            write!(f, ", p{}{}", p.comparator.symbol(), p.value)?;
        }
        if let Some(n) = self.n {
            write!(f, ", n={n}")?;
        }
        Ok(())
    }
}

fn below_df_bound(n: u64, df1: u32, df2: u32) -> bool {
    // n < df2/df1 + 1, kept in integers.
    (n as u128) * (df1 as u128) < (df2 as u128) + (df1 as u128)
}

fn p_mismatch(f: f64, df1: u32, df2: u32, p: ReportedP, tolerance: f64) -> bool {
    let Ok(implied) = f_upper_tail(f, f64::from(df1), f64::from(df2)) else {
        return false;
    };
    match p.comparator {
        Comparator::Eq => (implied - p.value).abs() > tolerance,
        Comparator::Lt => implied > p.value + tolerance,
        Comparator::Gt => implied < p.value - tolerance,
    }
}

/// Compares the reported p value (if any) with the upper tail of
/// `F(df1, df2)` at the reported F.
pub fn check_p_consistency(summary: &AnovaSummary, tolerance: f64) -> Option<Warning> {
    let p = summary.reported_p()?;
    p_mismatch(summary.f_value(), summary.df1(), summary.df2(), p, tolerance)
        .then_some(Warning::PFMismatch)
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, expected: &str) -> Error {
        Error::Parse {
            offset: self.pos + 1,
            expected: expected.to_string(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("'{}'", byte as char)))
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn integer<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        self.skip_ws();
        let start = self.pos;
        if self.digits() == 0 {
            return Err(self.error(what));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse().map_err(|_| {
            Error::Validation(format!("{what} `{text}` at byte {} is out of range", start + 1))
        })
    }

    fn real(&mut self, what: &str) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let whole = self.digits();
        let mut frac = 0;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac = self.digits();
        }
        if whole == 0 && frac == 0 {
            self.pos = start;
            return Err(self.error(what));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return Err(self.error("exponent digits"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        text.parse()
            .map_err(|_| Error::Validation(format!("`{text}` at byte {} is not a number", start + 1)))
    }
}

/// Parses `F(df1,df2)=F [, p=..] [, n=..]`.
pub fn parse_summary(text: &str) -> Result<ReportedSummary> {
    parse_summary_bytes(text.as_bytes())
}

/// Like [`parse_summary`], over raw bytes. Non-ASCII input is a parse error.
pub fn parse_summary_bytes(src: &[u8]) -> Result<ReportedSummary> {
    let mut cur = Cursor { src, pos: 0 };
    cur.expect(b'F')?;
    cur.expect(b'(')?;
    let df1: u32 = cur.integer("numerator degrees of freedom")?;
    cur.expect(b',')?;
    let df2: u32 = cur.integer("denominator degrees of freedom")?;
    cur.expect(b')')?;
    cur.expect(b'=')?;
    let f_value = cur.real("F value")?;

    let mut n = None;
    let mut reported_p = None;
    while cur.peek().is_some() {
        cur.expect(b',')?;
        match cur.peek() {
            Some(b'p') if reported_p.is_none() => {
                cur.pos += 1;
                let comparator = match cur.peek() {
                    Some(b'=') => Comparator::Eq,
                    Some(b'<') => Comparator::Lt,
                    Some(b'>') => Comparator::Gt,
                    _ => return Err(cur.error("'=', '<' or '>'")),
                };
                cur.pos += 1;
                let value = cur.real("p value")?;
                reported_p = Some(ReportedP { comparator, value });
            }
            Some(b'n' | b'N') if n.is_none() => {
                cur.pos += 1;
                cur.expect(b'=')?;
                n = Some(cur.integer::<u64>("sample size")?);
            }
            _ => {
                let mut expected = Vec::new();
                if reported_p.is_none() {
                    expected.push("'p'");
                }
                if n.is_none() {
                    expected.push("'n'");
                }
                if expected.is_empty() {
                    return Err(cur.error("end of input"));
                }
                return Err(cur.error(&expected.join(" or ")));
            }
        }
    }

    if !f_value.is_finite() || f_value < 0.0 {
        return Err(Error::Validation(format!(
            "F must be non-negative, got {f_value}"
        )));
    }
    if df1 == 0 || df2 == 0 {
        return Err(Error::Validation(
            "degrees of freedom must be positive".to_string(),
        ));
    }
    if let Some(n) = n {
        if n < 2 {
            return Err(Error::Validation(format!("n must be at least 2, got {n}")));
        }
    }
    if let Some(p) = reported_p {
        if !(p.value > 0.0 && p.value < 1.0) {
            return Err(Error::Validation(format!(
                "p must lie in (0, 1), got {}",
                p.value
            )));
        }
    }
    Ok(ReportedSummary {
        f_value,
        df1,
        df2,
        n,
        reported_p,
    })
}

/// One successfully read CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRecord {
    pub summary: AnovaSummary,
    /// 1-based line in the input; the header is line 1.
    pub source_line: u64,
    pub warnings: Vec<Warning>,
}

struct Columns {
    f: usize,
    df1: usize,
    df2: usize,
    n: usize,
    label: Option<usize>,
    p: Option<usize>,
}

impl Columns {
    fn from_header(header: &csv::StringRecord) -> Result<Self> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name);
        let required = |name: &str| find(name).ok_or_else(|| Error::MissingColumn(name.into()));
        Ok(Columns {
            f: required("f")?,
            df1: required("df1")?,
            df2: required("df2")?,
            n: required("n")?,
            label: find("label"),
            p: find("p"),
        })
    }
}

fn cell<'r>(record: &'r csv::StringRecord, idx: usize, column: &str, line: u64) -> Result<&'r str> {
    record.get(idx).map(str::trim).ok_or_else(|| Error::Row {
        line,
        column: column.to_string(),
        message: "missing field".to_string(),
    })
}

fn parse_cell<T: std::str::FromStr>(
    record: &csv::StringRecord,
    idx: usize,
    column: &str,
    line: u64,
) -> Result<T> {
    let raw = cell(record, idx, column, line)?;
    raw.parse().map_err(|_| Error::Row {
        line,
        column: column.to_string(),
        message: format!("cannot parse `{raw}`"),
    })
}

fn parse_row(record: &csv::StringRecord, cols: &Columns, line: u64) -> Result<SummaryRecord> {
    let row_err = |column: &str, err: Error| Error::Row {
        line,
        column: column.to_string(),
        message: err.to_string(),
    };

    let f: f64 = parse_cell(record, cols.f, "f", line)?;
    let df1: u32 = parse_cell(record, cols.df1, "df1", line)?;
    let df2: u32 = parse_cell(record, cols.df2, "df2", line)?;
    let n: u64 = parse_cell(record, cols.n, "n", line)?;

    if !f.is_finite() || f < 0.0 {
        return Err(row_err("f", Error::Validation(format!("F must be non-negative, got {f}"))));
    }
    if df1 == 0 {
        return Err(row_err("df1", Error::Validation("must be positive".into())));
    }
    if df2 == 0 {
        return Err(row_err("df2", Error::Validation("must be positive".into())));
    }
    if n < 2 {
        return Err(row_err("n", Error::Validation(format!("must be at least 2, got {n}"))));
    }
    let mut summary = AnovaSummary::new(f, df1, df2, n).map_err(|e| row_err("f", e))?;

    if let Some(idx) = cols.label {
        let label = cell(record, idx, "label", line)?;
        if !label.is_empty() {
            summary = summary.with_label(label);
        }
    }
    if let Some(idx) = cols.p {
        if !cell(record, idx, "p", line)?.is_empty() {
            let p: f64 = parse_cell(record, idx, "p", line)?;
            summary = summary
                .with_reported_p(ReportedP::exact(p))
                .map_err(|e| row_err("p", e))?;
        }
    }

    let mut warnings = Vec::new();
    if let Some(w) = check_p_consistency(&summary, DEFAULT_P_TOLERANCE) {
        warnings.push(w);
    }
    if below_df_bound(n, df1, df2) {
        warnings.push(Warning::NLtDfBound);
    }
    Ok(SummaryRecord {
        summary,
        source_line: line,
        warnings,
    })
}

/// Reads a batch of summaries. The outer error is a schema problem with the
/// whole file; each row then succeeds or fails on its own, in input order.
pub fn parse_batch_csv<R: Read>(input: R) -> Result<Vec<Result<SummaryRecord>>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    let cols = Columns::from_header(&header)?;

    let mut out = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(0, |p| p.line());
                out.push(parse_row(&record, &cols, line));
            }
            Err(e) => {
                // Malformed UTF-8 and the like: report against the row and go on.
                let line = e.position().map_or(0, |p| p.line());
                out.push(Err(Error::Row {
                    line,
                    column: "*".to_string(),
                    message: e.to_string(),
                }));
                if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                    break;
                }
            }
        }
    }
    Ok(out)
}
