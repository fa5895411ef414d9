use std::io::Write;

use ncf_core::measures::RandomSource;
use ncf_core::natext::{
    digit_law_given_past, extended_digit, inverse_branch, natext_forward, natext_inverse, verify_theorem_3_3,
    ExtendedMeasure, NatExtPoint,
};
use ncf_core::{NcfParams, RealExpr};
use serde_json::{json, Map, Value};

use super::{digits_json, law_json, law_rows, parse_digits, parse_expr, parse_f64, parse_f64_list, Render, LAW_HEADER};
use crate::cli::{NatextCommand, PointArgs};
use crate::formats::{document, f64_json, uint_json, Report};
use crate::{CliResult, Context};

/// Burn-in of the stationary chain before the digit law is recorded.
const BURN: usize = 64;

fn point_json<T: Render>(p: &NatExtPoint<T>) -> Value {
    json!({"x": p.x.json(), "y": p.y.json(), "x_f64": f64_json(p.x.to_f64()), "y_f64": f64_json(p.y.to_f64())})
}

fn point_row<T: Render>(p: &NatExtPoint<T>) -> Vec<String> {
    vec![p.x.to_f64().to_string(), p.y.to_f64().to_string()]
}

/// Applies `f` exactly when both coordinates are rational, and on
/// enclosures of increasing precision otherwise.
fn on_point<R>(
    args: &PointArgs,
    ctx: &Context,
    f: impl Fn(&dyn PointOp) -> ncf_core::Result<R>,
) -> CliResult<R> {
    let x: RealExpr = parse_expr(&args.x)?;
    let y: RealExpr = parse_expr(&args.y)?;
    if let (Some(xr), Some(yr)) = (x.to_rational(), y.to_rational()) {
        return Ok(f(&NatExtPoint::new(xr, yr))?);
    }
    Ok(ctx.policy.run(|bits| f(&NatExtPoint::new(x.enclose(bits)?, y.enclose(bits)?)))?)
}

/// The natural-extension operations, object-safe over the scalar kind.
trait PointOp {
    fn forward(&self, params: NcfParams) -> ncf_core::Result<(Value, Vec<String>)>;
    fn inverse(&self, params: NcfParams) -> ncf_core::Result<(Value, Vec<String>)>;
    fn digit(&self, l: i64, params: NcfParams) -> ncf_core::Result<num_bigint::BigUint>;
}

impl<T: Render> PointOp for NatExtPoint<T> {
    fn forward(&self, params: NcfParams) -> ncf_core::Result<(Value, Vec<String>)> {
        let p = natext_forward(self, params)?;
        Ok((point_json(&p), point_row(&p)))
    }

    fn inverse(&self, params: NcfParams) -> ncf_core::Result<(Value, Vec<String>)> {
        let p = natext_inverse(self, params)?;
        Ok((point_json(&p), point_row(&p)))
    }

    fn digit(&self, l: i64, params: NcfParams) -> ncf_core::Result<num_bigint::BigUint> {
        extended_digit(self, l, params)
    }
}

fn with_n(name: &str, params: NcfParams) -> Map<String, Value> {
    let mut doc = document(name);
    doc.insert("N".into(), json!(params.n()));
    doc
}

pub fn run(cmd: &NatextCommand, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let params = ctx.params()?;
    let report = match cmd {
        NatextCommand::Forward(pt) | NatextCommand::Inverse(pt) => {
            let forward = matches!(cmd, NatextCommand::Forward(_));
            let (image, row) =
                on_point(pt, ctx, |p| if forward { p.forward(params) } else { p.inverse(params) })?;
            let mut doc = with_n(if forward { "natext.forward" } else { "natext.inverse" }, params);
            doc.insert("x".into(), json!(pt.x));
            doc.insert("y".into(), json!(pt.y));
            doc.insert("image".into(), image);
            Report { json: Value::Object(doc), header: &["x", "y"], rows: vec![row] }
        }
        NatextCommand::Branch { y, i } => {
            let e = parse_expr(y)?;
            let (v, f) = match e.to_rational() {
                Some(r) => {
                    let b = inverse_branch(&r, *i, params)?;
                    (b.json(), b.to_f64())
                }
                None => {
                    let b = ctx.policy.run(|bits| inverse_branch(&e.enclose(bits)?, *i, params))?;
                    (b.json(), b.to_f64())
                }
            };
            let mut doc = with_n("natext.branch", params);
            doc.insert("y".into(), json!(y));
            doc.insert("i".into(), json!(i));
            doc.insert("value".into(), v);
            doc.insert("value_f64".into(), f64_json(f));
            Report { json: Value::Object(doc), header: &["y", "i", "value"], rows: vec![vec![y.clone(), i.to_string(), f.to_string()]] }
        }
        NatextCommand::Digit { point, l } => {
            let d = on_point(point, ctx, |p| p.digit(*l, params))?;
            let mut doc = with_n("natext.digit", params);
            doc.insert("x".into(), json!(point.x));
            doc.insert("y".into(), json!(point.y));
            doc.insert("l".into(), json!(l));
            doc.insert("digit".into(), uint_json(&d));
            Report { json: Value::Object(doc), header: &["l", "digit"], rows: vec![vec![l.to_string(), d.to_string()]] }
        }
        NatextCommand::Rect { x1, x2, y1, y2 } => {
            let (x1, x2, y1, y2) = (parse_f64(x1)?, parse_f64(x2)?, parse_f64(y1)?, parse_f64(y2)?);
            let m = ExtendedMeasure::new(params);
            let rect = m.rect(x1, x2, y1, y2)?;
            let pre = m.preimage_measure(x1, x2, y1, y2)?;
            let mut doc = with_n("natext.rect", params);
            doc.insert("rect".into(), json!([f64_json(x1), f64_json(x2), f64_json(y1), f64_json(y2)]));
            doc.insert("measure".into(), f64_json(rect));
            doc.insert(
                "preimage".into(),
                json!({"value": f64_json(pre.value), "radius": f64_json(pre.radius), "terms": pre.terms}),
            );
            doc.insert("gap".into(), f64_json((pre.value - rect).abs()));
            Report {
                json: Value::Object(doc),
                header: &["measure", "preimage", "preimage_radius"],
                rows: vec![vec![rect.to_string(), pre.value.to_string(), pre.radius.to_string()]],
            }
        }
        NatextCommand::Conditional { history, x, samples } => {
            let d = parse_digits(params, history)?;
            let grid = parse_f64_list(x)?;
            let mut rng = RandomSource::new(ctx.seed);
            let r = verify_theorem_3_3(&d, &grid, *samples, &mut rng)?;
            let rows_json: Vec<Value> = r
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "x": f64_json(row.x),
                        "empirical": f64_json(row.empirical),
                        "cylinder_exact": f64_json(row.cylinder_exact),
                        "limit": f64_json(row.limit),
                        "stderr": f64_json(row.stderr),
                        "z": f64_json(row.z),
                    })
                })
                .collect();
            let rows = r
                .rows
                .iter()
                .map(|row| {
                    [row.x, row.empirical, row.cylinder_exact, row.limit, row.stderr, row.z]
                        .iter()
                        .map(|v| v.to_string())
                        .collect()
                })
                .collect();
            let mut doc = with_n("natext.conditional", params);
            doc.insert("history".into(), digits_json(&d));
            doc.insert("a".into(), f64_json(r.a));
            doc.insert("samples".into(), json!(r.samples));
            doc.insert("seed".into(), json!(ctx.seed));
            doc.insert("max_abs_z".into(), f64_json(r.max_abs_z));
            doc.insert("max_dev_limit".into(), f64_json(r.max_dev_limit));
            doc.insert("max_exact_dev".into(), f64_json(r.max_exact_dev));
            doc.insert("rows".into(), Value::Array(rows_json));
            Report {
                json: Value::Object(doc),
                header: &["x", "empirical", "cylinder_exact", "limit", "stderr", "z"],
                rows,
            }
        }
        NatextCommand::Past { samples, max_digit } => {
            let mut rng = RandomSource::new(ctx.seed);
            let last = max_digit.unwrap_or(params.n() + 15);
            let r = digit_law_given_past(params, *samples, BURN, last, &mut rng);
            let mut doc = with_n("natext.past", params);
            doc.insert("seed".into(), json!(ctx.seed));
            doc.insert("law".into(), law_json(&r));
            Report { json: Value::Object(doc), header: LAW_HEADER, rows: law_rows(&r) }
        }
    };
    Ok(report.write(ctx.format, out)?)
}
