//! Output formats: one JSON document per line with a versioned `schema`
//! field, or CSV with a fixed header per command.

use std::io::{self, Write};
use std::str::FromStr;

use clap::ValueEnum;
use ncf_core::numerics::Rounding;
use ncf_core::{ExactRational, PrecisionReal};
use num_bigint::{BigInt, BigUint};
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Schema identifier for a command's JSON output.
pub fn schema(name: &str) -> String {
    format!("ncf.{name}.v1")
}

/// A JSON object whose first key is `schema`.
pub fn document(name: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), Value::String(schema(name)));
    m
}

/// Arbitrary-size integer as a JSON number.
pub fn int_json(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer literal"))
}

pub fn uint_json(n: &BigUint) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer literal"))
}

/// Rationals serialize as the string `"p/q"`.
pub fn rational_json(r: &ExactRational) -> Value {
    Value::String(r.to_string())
}

/// Non-finite floats become `null`.
pub fn f64_json(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Decimal digits used for the midpoint of an enclosure of `bits` bits.
fn decimal_digits(bits: u32) -> u32 {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as u32 + 2
}

/// An enclosure as decimal strings `(value, radius)`: the decimal value is
/// the rounded midpoint and the radius covers both the enclosure and that
/// rounding.
pub fn real_decimal(x: &PrecisionReal) -> (String, String) {
    let digits = decimal_digits(x.precision());
    let value = x.value().to_decimal(digits, Rounding::Nearest);
    let ulp = ExactRational::new(BigInt::from(1), num_traits_pow10(digits)).expect("power of ten");
    let radius = x.radius() + ulp;
    (value, radius_up(&radius))
}

fn num_traits_pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

/// A positive rational as a short scientific literal not smaller than it.
fn radius_up(r: &ExactRational) -> String {
    let f = r.to_f64();
    let up = if f > 0.0 && f.is_finite() {
        f64::from_bits(f.to_bits() + 2)
    } else {
        f64::MIN_POSITIVE
    };
    // Three significant digits, rounded up.
    let s = format!("{up:.2e}");
    let (mant, exp) = s.split_once('e').expect("scientific literal");
    let m: f64 = mant.parse().expect("mantissa");
    let bumped = (m * 100.0).round() / 100.0 + 0.01;
    format!("{bumped:.2}e{exp}")
}

pub fn real_json(x: &PrecisionReal) -> Value {
    let (value, radius) = real_decimal(x);
    let mut m = Map::new();
    m.insert("value".into(), Value::String(value));
    m.insert("radius".into(), Value::String(radius));
    Value::Object(m)
}

/// Writes one compact JSON document followed by a newline.
pub fn write_json(out: &mut dyn Write, doc: &Value) -> io::Result<()> {
    serde_json::to_writer(&mut *out, doc)?;
    out.write_all(b"\n")
}

/// A CSV writer with a fixed header already written.
pub struct CsvOut<'a> {
    inner: csv::Writer<&'a mut dyn Write>,
}

impl<'a> CsvOut<'a> {
    pub fn new(out: &'a mut dyn Write, header: &[&str]) -> io::Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(header).map_err(csv_io)?;
        Ok(Self { inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> io::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(csv_io)
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn csv_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// Either a JSON document or a CSV table, chosen by the caller's format.
pub struct Report {
    pub json: Value,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Json => write_json(out, &self.json),
            Format::Csv => {
                let mut w = CsvOut::new(out, self.header)?;
                for r in &self.rows {
                    w.row(r)?;
                }
                w.finish()
            }
        }
    }
}
