use std::io::Write;

use ncf_core::measures::{
    bbl_cdf, bbl_cdf_exact, digit_conditional, g_measure, k_norm, lebesgue_digit_law, pullback_measure, rho_density,
    stationary_digit_law, BrodenState,
};
use serde_json::{json, Value};

use super::{digits_json, digits_text, parse_digits, parse_expr, parse_f64, parse_rational};
use crate::cli::MeasureCommand;
use crate::formats::{document, f64_json, rational_json, Report};
use crate::{CliError, CliResult, Context};

pub fn run(cmd: &MeasureCommand, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let params = ctx.params()?;
    let mut doc = document(match cmd {
        MeasureCommand::Interval { .. } => "measure.interval",
        MeasureCommand::Density { .. } => "measure.density",
        MeasureCommand::Digit { .. } => "measure.digit",
        MeasureCommand::Bbl { .. } => "measure.bbl",
    });
    doc.insert("N".into(), json!(params.n()));
    let report = match cmd {
        MeasureCommand::Interval { a, b, tol } => {
            let (a, b) = (parse_f64(a)?, parse_f64(b)?);
            let g = g_measure(a, b, params)?;
            let pre = pullback_measure(a, b, params, *tol)?;
            doc.insert("a".into(), f64_json(a));
            doc.insert("b".into(), f64_json(b));
            doc.insert("measure".into(), f64_json(g));
            doc.insert("lebesgue".into(), f64_json(b - a));
            doc.insert(
                "preimage".into(),
                json!({"value": f64_json(pre.value), "radius": f64_json(pre.radius), "terms": pre.terms}),
            );
            doc.insert("gap".into(), f64_json((pre.value - g).abs()));
            Report {
                json: Value::Object(doc),
                header: &["a", "b", "measure", "preimage", "preimage_radius", "terms"],
                rows: vec![vec![
                    a.to_string(),
                    b.to_string(),
                    g.to_string(),
                    pre.value.to_string(),
                    pre.radius.to_string(),
                    pre.terms.to_string(),
                ]],
            }
        }
        MeasureCommand::Density { x } => {
            let x = parse_f64(x)?;
            if !(0.0..=1.0).contains(&x) {
                return Err(ncf_core::Error::OutOfRange(x.to_string()).into());
            }
            let rho = rho_density(x, params);
            doc.insert("x".into(), f64_json(x));
            doc.insert("density".into(), f64_json(rho));
            doc.insert("k".into(), f64_json(k_norm(params)));
            Report {
                json: Value::Object(doc),
                header: &["x", "density"],
                rows: vec![vec![x.to_string(), rho.to_string()]],
            }
        }
        MeasureCommand::Digit { i, s, history } => {
            let state = match (s, history) {
                (Some(_), Some(_)) => return Err(CliError::Usage("give either --s or --history".into())),
                (Some(s), None) => BrodenState::from_exact(params, parse_rational(s)?)?,
                (None, Some(h)) => BrodenState::from_history(&parse_digits(params, h)?),
                (None, None) => BrodenState::initial(params),
            };
            let leb = lebesgue_digit_law(*i, params)?;
            let stat = stationary_digit_law(*i, params)?;
            let cond = digit_conditional(*i, &state)?;
            doc.insert("i".into(), json!(i));
            doc.insert("lebesgue".into(), f64_json(leb));
            doc.insert("stationary".into(), f64_json(stat));
            doc.insert("s".into(), state.exact().map_or(Value::Null, rational_json));
            doc.insert("s_f64".into(), f64_json(state.s()));
            doc.insert("conditional".into(), f64_json(cond));
            Report {
                json: Value::Object(doc),
                header: &["i", "lebesgue", "stationary", "s", "conditional"],
                rows: vec![vec![
                    i.to_string(),
                    leb.to_string(),
                    stat.to_string(),
                    state.s().to_string(),
                    cond.to_string(),
                ]],
            }
        }
        MeasureCommand::Bbl { history, x } => {
            let d = parse_digits(params, history)?;
            let state = BrodenState::from_history(&d);
            let expr = parse_expr(x)?;
            let (exact, approx) = match expr.to_rational() {
                Some(r) => {
                    if !r.in_unit_interval() {
                        return Err(ncf_core::Error::OutOfRange(r.to_string()).into());
                    }
                    let c = bbl_cdf_exact(&r, &state)?;
                    let f = c.to_f64();
                    (Some(c), f)
                }
                None => {
                    let xf = parse_f64(x)?;
                    if !(0.0..=1.0).contains(&xf) {
                        return Err(ncf_core::Error::OutOfRange(xf.to_string()).into());
                    }
                    (None, bbl_cdf(xf, &state))
                }
            };
            doc.insert("history".into(), digits_json(&d));
            doc.insert("s".into(), state.exact().map_or(Value::Null, rational_json));
            doc.insert("x".into(), Value::String(x.clone()));
            doc.insert("cdf".into(), exact.as_ref().map_or(Value::Null, rational_json));
            doc.insert("cdf_f64".into(), f64_json(approx));
            Report {
                json: Value::Object(doc),
                header: &["history", "s", "x", "cdf", "cdf_f64"],
                rows: vec![vec![
                    digits_text(&d),
                    state.exact().map_or(String::new(), |s| s.to_string()),
                    x.clone(),
                    exact.map_or(String::new(), |c| c.to_string()),
                    approx.to_string(),
                ]],
            }
        }
    };
    Ok(report.write(ctx.format, out)?)
}
