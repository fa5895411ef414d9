mod arith;
mod measure;
mod natext;
mod operator;
mod simulate;

use std::io::Write;

use ncf_core::expansion::{expand, expand_enclosure};
use ncf_core::measures::DigitLawReport;
use ncf_core::{DigitSequence, ExactRational, Expansion, NcfParams, PrecisionReal, RealExpr, Scalar};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::cli::Command;
use crate::formats::{f64_json, rational_json, real_json};
use crate::{CliError, CliResult, Context};

pub fn dispatch(cmd: &Command, ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Expand(a) => arith::expand_cmd(a, ctx, out),
        Command::Eval(a) => arith::eval_cmd(a, ctx, out),
        Command::Convergents(a) => arith::convergents_cmd(a, ctx, out),
        Command::Cylinder(a) => arith::cylinder_cmd(a, ctx, out),
        Command::Legendre(a) => arith::legendre_cmd(a, ctx, out),
        Command::Measure(a) => measure::run(&a.command, ctx, out),
        Command::Density(a) => operator::density_cmd(a, ctx, out, err),
        Command::Operator(a) => operator::run(&a.command, ctx, out),
        Command::Simulate(a) => simulate::run(&a.command, ctx, out, err),
        Command::Natext(a) => natext::run(&a.command, ctx, out),
    }
}

/// Scalars that can be printed: exact rationals and enclosures.
pub(crate) trait Render: Scalar {
    fn json(&self) -> Value;
    fn expansion(&self, params: NcfParams, depth: usize) -> ncf_core::Result<Expansion>;
}

impl Render for ExactRational {
    fn json(&self) -> Value {
        rational_json(self)
    }

    fn expansion(&self, params: NcfParams, depth: usize) -> ncf_core::Result<Expansion> {
        expand(self, params, depth)
    }
}

impl Render for PrecisionReal {
    fn json(&self) -> Value {
        real_json(self)
    }

    fn expansion(&self, params: NcfParams, depth: usize) -> ncf_core::Result<Expansion> {
        expand_enclosure(self, params, depth)
    }
}

pub(crate) fn parse_expr(s: &str) -> CliResult<RealExpr> {
    Ok(s.parse::<RealExpr>()?)
}

pub(crate) fn parse_rational(s: &str) -> CliResult<ExactRational> {
    Ok(s.parse::<ExactRational>()?)
}

/// A real given as a rational or an expression, rounded to `f64`.
pub(crate) fn parse_f64(s: &str) -> CliResult<f64> {
    let e = parse_expr(s)?;
    let v = match e.to_rational() {
        Some(r) => r.to_f64(),
        None => e.enclose(128)?.to_f64(),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("`{s}` is not a finite number")))
    }
}

pub(crate) fn parse_f64_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(|t| parse_f64(t.trim())).collect()
}

pub(crate) fn parse_digits(params: NcfParams, s: &str) -> CliResult<DigitSequence> {
    let s = s.trim();
    let digits = if s.is_empty() {
        Vec::new()
    } else {
        s.split(',')
            .map(|t| {
                t.trim().parse::<BigUint>().map_err(|_| CliError::Usage(format!("malformed digit `{}`", t.trim())))
            })
            .collect::<CliResult<Vec<_>>>()?
    };
    Ok(DigitSequence::new(params, digits)?)
}

pub(crate) fn digits_json(d: &DigitSequence) -> Value {
    Value::Array(d.digits().iter().map(crate::formats::uint_json).collect())
}

pub(crate) fn digits_text(d: &DigitSequence) -> String {
    d.digits().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
}

pub(crate) const LAW_HEADER: &[&str] = &["digit", "observed", "expected", "stderr", "z"];

pub(crate) fn law_json(r: &DigitLawReport) -> Value {
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "digit": row.digit,
                "observed": f64_json(row.observed),
                "expected": f64_json(row.expected),
                "stderr": f64_json(row.stderr),
                "z": f64_json(row.z),
            })
        })
        .collect();
    json!({
        "samples": r.samples,
        "overflow": r.overflow,
        "max_abs_z": f64_json(r.max_abs_z),
        "rows": rows,
    })
}

pub(crate) fn law_rows(r: &DigitLawReport) -> Vec<Vec<String>> {
    r.rows
        .iter()
        .map(|row| {
            vec![
                row.digit.to_string(),
                row.observed.to_string(),
                row.expected.to_string(),
                row.stderr.to_string(),
                row.z.to_string(),
            ]
        })
        .collect()
}
