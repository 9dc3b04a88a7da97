//! Report tables. JSON and CSV carry the same cell strings.

use heightlab::numlin::ball::decimal_string;
use heightlab::numlin::{BallReal, BigRat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Value};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub label: String,
    pub metadata: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, label: &str, columns: &[&str]) -> Self {
        Report {
            command: command.into(),
            label: label.into(),
            metadata: Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.into(), value.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Cell of `row` under `column`.
    pub fn cell(&self, row: usize, column: &str) -> Option<&str> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.rows.get(row).map(|r| r[j].as_str())
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), self.command.clone().into());
        obj.insert("label".into(), self.label.clone().into());
        obj.insert("version".into(), VERSION.into());
        obj.insert("metadata".into(), Value::Object(self.metadata.clone()));
        obj.insert("columns".into(), self.columns.clone().into());
        obj.insert("rows".into(), self.rows.clone().into());
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv_string(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(&self.columns).map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    /// Parses CSV text back into header and rows.
    pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r
            .headers()
            .map_err(|e| CliError::Io(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let mut rows = vec![];
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Io(e.to_string()))?;
            rows.push(rec.iter().map(String::from).collect());
        }
        Ok((header, rows))
    }
}

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// `floor(log10 a)` for `a > 0`.
fn log10_floor(a: &BigRat) -> i64 {
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let ten = |k: i64| {
        if k >= 0 {
            BigRat::from_integer(pow10(k as u32))
        } else {
            BigRat::new(BigInt::one(), pow10((-k) as u32))
        }
    };
    while a < &ten(e) {
        e -= 1;
    }
    while a >= &ten(e + 1) {
        e += 1;
    }
    e
}

fn plain(m: &BigInt, k: i64) -> String {
    // m * 10^k, m >= 0
    if k >= 0 {
        return format!("{}{}", m, "0".repeat(k as usize));
    }
    let digits = m.to_string();
    let shift = (-k) as usize;
    let (int, frac) = if digits.len() > shift {
        let (a, b) = digits.split_at(digits.len() - shift);
        (a.to_string(), b.to_string())
    } else {
        ("0".to_string(), format!("{}{}", "0".repeat(shift - digits.len()), digits))
    };
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        int
    } else {
        format!("{int}.{frac}")
    }
}

/// A decimal with `sig` significant digits rounded away from `q` in the
/// requested direction, so that `[down, up]` still encloses `q`.
pub fn decimal_bound(q: &BigRat, sig: usize, up: bool) -> String {
    if q.is_zero() {
        return "0".into();
    }
    if q.is_integer() && q.numer().abs().to_string().len() <= sig {
        return q.numer().to_string();
    }
    let neg = q.is_negative();
    let a = q.abs();
    let e = log10_floor(&a);
    let k = e - (sig as i64 - 1);
    let scaled = if k >= 0 {
        &a / BigRat::from_integer(pow10(k as u32))
    } else {
        &a * BigRat::from_integer(pow10((-k) as u32))
    };
    // away from zero when rounding outward on the magnitude
    let outward = up != neg;
    let (quot, rem) = scaled.numer().div_rem(scaled.denom());
    let m = if outward && !rem.is_zero() { quot + 1 } else { quot };
    let body = if (-6..=20).contains(&e) {
        plain(&m, k)
    } else {
        let digits = m.to_string();
        let exp = k + digits.len() as i64 - 1;
        let (lead, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        if rest.is_empty() {
            format!("{lead}e{exp}")
        } else {
            format!("{lead}.{rest}e{exp}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `[lo, hi]` as outward-rounded decimal strings.
pub fn enclosure(b: &BallReal, sig: usize) -> Value {
    Value::from(vec![decimal_bound(&b.lower(), sig, false), decimal_bound(&b.upper(), sig, true)])
}

pub fn mid(b: &BallReal, sig: usize) -> String {
    decimal_string(b.mid(), sig)
}

pub fn radius(b: &BallReal) -> String {
    if b.is_exact() {
        "0".into()
    } else {
        decimal_bound(b.rad(), 3, true)
    }
}
