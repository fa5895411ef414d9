use std::io::Write;

use ncf_core::cylinders::{cylinder, cylinder_contains, legendre_test_expr, theta, Parity};
use ncf_core::expansion::{approximation_error, convergents, eval_digits, orbit_from_convergents};
use ncf_core::{Error, ExactRational, NcfParams, RealExpr};
use num_bigint::BigInt;
use serde_json::{json, Value};

use super::{digits_json, digits_text, parse_digits, parse_expr, parse_rational, Render};
use crate::cli::{CylinderArgs, DigitsArgs, EvalArgs, ExpandArgs, LegendreArgs};
use crate::formats::{document, f64_json, int_json, rational_json, Report};
use crate::{CliError, CliResult, Context};

const EXPAND_HEADER: &[&str] = &["n", "digit", "p", "q", "orbit", "error", "bound", "theta"];

pub fn expand_cmd(args: &ExpandArgs, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let params = ctx.params()?;
    if args.depth == 0 {
        return Err(CliError::Usage("--depth must be at least 1".into()));
    }
    let x = parse_expr(&args.x)?;
    let report = match x.to_rational() {
        Some(r) => expansion_report(&args.x, &r, params, args.depth, None)?,
        None => ctx.policy.run(|bits| {
            let e = x.enclose(bits)?;
            expansion_report(&args.x, &e, params, args.depth, Some(bits))
        })?,
    };
    Ok(report.write(ctx.format, out)?)
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

fn expansion_report<T: Render>(
    input: &str,
    x: &T,
    params: NcfParams,
    depth: usize,
    bits: Option<u32>,
) -> ncf_core::Result<Report> {
    let e = x.expansion(params, depth)?;
    let table = convergents(&e.digits);
    let mut steps = Vec::new();
    let mut rows = Vec::new();
    for n in 1..=e.digits.len() {
        let k = n as i64;
        let p = table.p(k)?;
        let q = table.q(k)?;
        let orbit = orbit_from_convergents(x, &table, n)?;
        let error = approximation_error(x, &table, n)?;
        let bound = ExactRational::new(num_traits_pow(params.n_big(), n), q * q)?;
        let th = theta(x, &e.digits, n)?;
        let digit = &e.digits.digits()[n - 1];
        steps.push(json!({
            "n": n,
            "digit": crate::formats::uint_json(digit),
            "p": int_json(p),
            "q": int_json(q),
            "orbit": orbit.json(),
            "error": error.json(),
            "error_f64": f64_json(error.to_f64()),
            "bound": rational_json(&bound),
            "theta": th.json(),
            "theta_f64": f64_json(th.to_f64()),
        }));
        rows.push(vec![
            n.to_string(),
            digit.to_string(),
            p.to_string(),
            q.to_string(),
            orbit.to_f64().to_string(),
            error.to_f64().to_string(),
            bound.to_f64().to_string(),
            th.to_f64().to_string(),
        ]);
    }
    let mut doc = document("expand");
    doc.insert("N".into(), json!(params.n()));
    doc.insert("x".into(), Value::String(input.into()));
    doc.insert("digits".into(), digits_json(&e.digits));
    doc.insert("terminated".into(), Value::Bool(e.terminated));
    doc.insert("precision_bits".into(), bits.map_or(Value::Null, |b| json!(b)));
    doc.insert("convergents".into(), Value::Array(steps));
    Ok(Report { json: Value::Object(doc), header: EXPAND_HEADER, rows })
}

fn num_traits_pow(b: BigInt, e: usize) -> BigInt {
    b.pow(e as u32)
}

pub fn eval_cmd(args: &EvalArgs, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let params = ctx.params()?;
    let d = parse_digits(params, &args.digits.digits)?;
    let tail = parse_rational(&args.tail)?;
    let value = eval_digits(&d, &tail)?;
    let mut doc = document("eval");
    doc.insert("N".into(), json!(params.n()));
    doc.insert("digits".into(), digits_json(&d));
    doc.insert("tail".into(), rational_json(&tail));
    doc.insert("value".into(), rational_json(&value));
    doc.insert("value_f64".into(), f64_json(value.to_f64()));
    let report = Report {
        json: Value::Object(doc),
        header: &["digits", "tail", "value", "value_f64"],
        rows: vec![vec![digits_text(&d), tail.to_string(), value.to_string(), value.to_f64().to_string()]],
    };
    Ok(report.write(ctx.format, out)?)
}

pub fn convergents_cmd(args: &DigitsArgs, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let params = ctx.params()?;
    let d = parse_digits(params, &args.digits)?;
    let table = convergents(&d);
    let len = d.len() as i64;
    let mut p = Vec::new();
    let mut q = Vec::new();
    let mut det = Vec::new();
    let mut rows = Vec::new();
    for k in -1..=len {
        let (pk, qk) = (table.p(k)?, table.q(k)?);
        p.push(int_json(pk));
        q.push(int_json(qk));
        let dk = if k >= 0 { Some(table.determinant(k)?) } else { None };
        if let Some(dk) = &dk {
            det.push(int_json(dk));
        }
        let digit = if k >= 1 { d.digits()[k as usize - 1].to_string() } else { String::new() };
        rows.push(vec![
            k.to_string(),
            digit,
            pk.to_string(),
            qk.to_string(),
            dk.map_or(String::new(), |v| v.to_string()),
        ]);
    }
    let mut doc = document("convergents");
    doc.insert("N".into(), json!(params.n()));
    doc.insert("digits".into(), digits_json(&d));
    doc.insert("first_index".into(), json!(-1));
    doc.insert("p".into(), Value::Array(p));
    doc.insert("q".into(), Value::Array(q));
    doc.insert("determinant".into(), Value::Array(det));
    let report =
        Report { json: Value::Object(doc), header: &["n", "digit", "p", "q", "determinant"], rows };
    Ok(report.write(ctx.format, out)?)
}

pub fn cylinder_cmd(args: &CylinderArgs, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let params = ctx.params()?;
    let d = parse_digits(params, &args.digits.digits)?;
    let c = cylinder(&d);
    let contains = match &args.x {
        None => None,
        Some(s) => {
            let x = parse_expr(s)?;
            Some(match x.to_rational() {
                Some(r) => cylinder_contains(&c, &r)?,
                None => ctx.policy.run(|bits| cylinder_contains(&c, &x.enclose(bits)?))?,
            })
        }
    };
    let (lo, hi, m) = (c.lo(), c.hi(), c.measure());
    let parity = parity_name(Parity::of(c.depth()));
    let mut doc = document("cylinder");
    doc.insert("N".into(), json!(params.n()));
    doc.insert("digits".into(), digits_json(&d));
    doc.insert("lo".into(), rational_json(&lo));
    doc.insert("hi".into(), rational_json(&hi));
    doc.insert("measure".into(), rational_json(&m));
    doc.insert("measure_f64".into(), f64_json(m.to_f64()));
    doc.insert("parity".into(), json!(parity));
    doc.insert("contains".into(), contains.map_or(Value::Null, Value::Bool));
    let report = Report {
        json: Value::Object(doc),
        header: &["digits", "lo", "hi", "measure", "measure_f64", "parity", "contains"],
        rows: vec![vec![
            digits_text(&d),
            lo.to_string(),
            hi.to_string(),
            m.to_string(),
            m.to_f64().to_string(),
            parity.into(),
            contains.map_or(String::new(), |b| b.to_string()),
        ]],
    };
    Ok(report.write(ctx.format, out)?)
}

const LEGENDRE_HEADER: &[&str] =
    &["p", "q", "accepted", "confirmed_by_expansion", "n", "representation", "q_n", "q_prev", "theta", "bound"];

pub fn legendre_cmd(args: &LegendreArgs, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let params = ctx.params()?;
    let parse_int = |s: &str| {
        s.trim().parse::<BigInt>().map_err(|_| CliError::Usage(format!("malformed integer `{s}`")))
    };
    let (p, q) = (parse_int(&args.p)?, parse_int(&args.q)?);
    let x: RealExpr = parse_expr(&args.x)?;
    let mut doc = document("legendre");
    doc.insert("N".into(), json!(params.n()));
    doc.insert("p".into(), int_json(&p));
    doc.insert("q".into(), int_json(&q));
    doc.insert("x".into(), Value::String(args.x.clone()));
    let report = match legendre_test_expr(&p, &q, &x, params, ctx.policy) {
        Ok(c) => {
            doc.insert("accepted".into(), Value::Bool(c.accepted));
            doc.insert("confirmed_by_expansion".into(), Value::Bool(c.confirmed_by_expansion));
            doc.insert("obstruction".into(), Value::Null);
            doc.insert("n".into(), json!(c.n));
            doc.insert("representation".into(), digits_json(&c.representation));
            doc.insert("rewritten".into(), Value::Bool(c.rewritten));
            doc.insert("fraction_below_x".into(), Value::Bool(c.fraction_below_x));
            doc.insert("q_n".into(), int_json(&c.q_n));
            doc.insert("q_prev".into(), int_json(&c.q_prev));
            doc.insert("theta".into(), c.theta.json());
            doc.insert("theta_f64".into(), f64_json(c.theta.to_f64()));
            doc.insert("bound".into(), rational_json(&c.bound));
            doc.insert("bound_f64".into(), f64_json(c.bound.to_f64()));
            let row = vec![
                p.to_string(),
                q.to_string(),
                c.accepted.to_string(),
                c.confirmed_by_expansion.to_string(),
                c.n.to_string(),
                digits_text(&c.representation),
                c.q_n.to_string(),
                c.q_prev.to_string(),
                c.theta.to_f64().to_string(),
                c.bound.to_f64().to_string(),
            ];
            Report { json: Value::Object(doc), header: LEGENDRE_HEADER, rows: vec![row] }
        }
        Err(Error::ParityUnreachable) => {
            doc.insert("accepted".into(), Value::Bool(false));
            doc.insert("confirmed_by_expansion".into(), Value::Bool(false));
            doc.insert("obstruction".into(), json!("parity_unreachable"));
            let mut row = vec![p.to_string(), q.to_string(), "false".into(), "false".into()];
            row.resize(LEGENDRE_HEADER.len(), String::new());
            Report { json: Value::Object(doc), header: LEGENDRE_HEADER, rows: vec![row] }
        }
        Err(e) => return Err(e.into()),
    };
    Ok(report.write(ctx.format, out)?)
}
