use std::io::Write;

use ncf_core::measures::{digit_conditional, lebesgue_digit_law, markov_step, BrodenState, RandomSource};
use ncf_core::natext::{natext_orbit, NatExtPoint};
use ncf_core::NcfParams;
use serde_json::{json, Value};

use super::{parse_rational, LAW_HEADER};
use crate::cli::SimulateCommand;
use crate::formats::{document, f64_json, rational_json, schema, uint_json, write_json, CsvOut, Format};
use crate::{CliResult, Context};

pub fn run(cmd: &SimulateCommand, ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cmd {
        SimulateCommand::Digits { samples, steps, max_digit, summary_only } => {
            digits(*samples, *steps, *max_digit, *summary_only, ctx, out, err)
        }
        SimulateCommand::Natext { steps, x, y } => natext(*steps, x, y, ctx, out, err),
    }
}

/// Per-digit sums of `1{a = i} - p_i` and of the conditional variances
/// `p_i (1 - p_i)`, where `p_i` is the law of the digit in the current state.
struct Tally {
    first: u64,
    count: Vec<u64>,
    sum: Vec<f64>,
    var: Vec<f64>,
    n: u64,
    overflow: u64,
}

impl Tally {
    fn new(first: u64, last: u64) -> Self {
        let k = (last - first + 1) as usize;
        Self { first, count: vec![0; k], sum: vec![0.0; k], var: vec![0.0; k], n: 0, overflow: 0 }
    }

    fn last(&self) -> u64 {
        self.first + self.count.len() as u64 - 1
    }

    /// Records digit `a` observed in a state whose law of the digit `i` is
    /// `prob(i)`.
    fn record(&mut self, a: u64, prob: impl Fn(u64) -> f64) {
        self.n += 1;
        if a > self.last() {
            self.overflow += 1;
        } else {
            self.count[(a - self.first) as usize] += 1;
        }
        for (j, (s, v)) in self.sum.iter_mut().zip(&mut self.var).enumerate() {
            let i = self.first + j as u64;
            let p = prob(i);
            *s += f64::from(u8::from(a == i)) - p;
            *v += p * (1.0 - p);
        }
    }

    /// Rows `(digit, observed, expected, stderr, z)`.
    fn rows(&self) -> Vec<(u64, f64, f64, f64, f64)> {
        let n = self.n as f64;
        (0..self.count.len())
            .map(|j| {
                let observed = self.count[j] as f64 / n;
                let mean = self.sum[j] / n;
                let expected = observed - mean;
                let stderr = self.var[j].sqrt() / n;
                let z = if stderr > 0.0 { mean / stderr } else { 0.0 };
                (self.first + j as u64, observed, expected, stderr, z)
            })
            .collect()
    }

    fn max_abs_z(&self) -> f64 {
        self.rows().iter().map(|r| r.4.abs()).fold(0.0, f64::max)
    }

    fn json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows()
            .into_iter()
            .map(|(d, o, e, s, z)| {
                json!({"digit": d, "observed": f64_json(o), "expected": f64_json(e), "stderr": f64_json(s), "z": f64_json(z)})
            })
            .collect();
        json!({"samples": self.n, "overflow": self.overflow, "max_abs_z": f64_json(self.max_abs_z()), "rows": rows})
    }
}

enum Sink<'a> {
    Quiet,
    Csv(Box<CsvOut<'a>>),
    Json(&'a mut dyn Write),
}

fn digits(
    samples: u64,
    steps: usize,
    max_digit: Option<u64>,
    summary_only: bool,
    ctx: &Context,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    let params = ctx.params()?;
    if steps == 0 {
        return Err(crate::CliError::Usage("--steps must be at least 1".into()));
    }
    if samples == 0 {
        return Ok(());
    }
    let n = params.n();
    let last = max_digit.unwrap_or(n + 15).max(n);
    let (first, transition) = sample_chains(params, samples, steps, last, summary_only, ctx, out)?;
    let max_z = first.max_abs_z().max(if steps > 1 { transition.max_abs_z() } else { 0.0 });
    match ctx.format {
        Format::Json => {
            let mut doc = document("simulate.digits.summary");
            doc.insert("N".into(), json!(n));
            doc.insert("seed".into(), json!(ctx.seed));
            doc.insert("samples".into(), json!(samples));
            doc.insert("steps".into(), json!(steps));
            doc.insert("first_digit".into(), first.json());
            doc.insert("transition".into(), if steps > 1 { transition.json() } else { Value::Null });
            doc.insert("max_abs_z".into(), f64_json(max_z));
            write_json(out, &Value::Object(doc))?;
        }
        Format::Csv if summary_only => {
            let mut header = vec!["law"];
            header.extend_from_slice(LAW_HEADER);
            let mut w = CsvOut::new(out, &header)?;
            let tallies: &[(&str, &Tally)] =
                if steps > 1 { &[("first", &first), ("transition", &transition)] } else { &[("first", &first)] };
            for (name, t) in tallies {
                for (d, o, e, s, z) in t.rows() {
                    w.row([name.to_string(), d.to_string(), o.to_string(), e.to_string(), s.to_string(), z.to_string()])?;
                }
            }
            w.finish()?;
        }
        Format::Csv => writeln!(err, "max_abs_z={max_z}")?,
    }
    Ok(())
}

/// Runs the chains, streaming each step unless `quiet`, and tallies the
/// first-digit and transition laws.
fn sample_chains(
    params: NcfParams,
    samples: u64,
    steps: usize,
    last: u64,
    quiet: bool,
    ctx: &Context,
    out: &mut dyn Write,
) -> CliResult<(Tally, Tally)> {
    let n = params.n();
    let mut first = Tally::new(n, last);
    let mut transition = Tally::new(n, last);
    let mut rng = RandomSource::new(ctx.seed);
    let line_schema = Value::String(schema("simulate.digits"));
    let mut sink = match (ctx.format, quiet) {
        (_, true) => Sink::Quiet,
        (Format::Csv, false) => Sink::Csv(Box::new(CsvOut::new(out, &["sample", "step", "digit", "s"])?)),
        (Format::Json, false) => Sink::Json(out),
    };
    for sample in 0..samples {
        let mut state = BrodenState::initial(params).float_only();
        for step in 1..=steps {
            let (a, next) = markov_step(&state, &mut rng);
            if step == 1 {
                first.record(a, |i| law(i, params));
            } else {
                transition.record(a, |i| digit_conditional(i, &state).unwrap_or(0.0));
            }
            match &mut sink {
                Sink::Quiet => {}
                Sink::Csv(w) => {
                    w.row([sample.to_string(), step.to_string(), a.to_string(), next.s().to_string()])?
                }
                Sink::Json(w) => {
                    let line = json!({
                        "schema": line_schema,
                        "sample": sample,
                        "step": step,
                        "digit": a,
                        "s": f64_json(next.s()),
                    });
                    write_json(*w, &line)?;
                }
            }
            state = next;
        }
    }
    if let Sink::Csv(w) = sink {
        w.finish()?;
    }
    Ok((first, transition))
}

fn law(i: u64, params: NcfParams) -> f64 {
    lebesgue_digit_law(i, params).unwrap_or(0.0)
}

fn natext(steps: usize, x: &str, y: &str, ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let params = ctx.params()?;
    let start = NatExtPoint::new(parse_rational(x)?, parse_rational(y)?);
    let orbit = natext_orbit(&start, steps, params)?;
    match ctx.format {
        Format::Json => {
            let line_schema = Value::String(schema("simulate.natext"));
            for p in &orbit {
                let line = json!({
                    "schema": line_schema,
                    "step": p.step,
                    "digit": uint_json(&p.digit),
                    "x": rational_json(&p.x),
                    "y": rational_json(&p.y),
                    "x_f64": f64_json(p.x.to_f64()),
                    "y_f64": f64_json(p.y.to_f64()),
                });
                write_json(out, &line)?;
            }
        }
        Format::Csv => {
            let mut w = CsvOut::new(out, &["step", "digit", "x", "y"])?;
            for p in &orbit {
                w.row([p.step.to_string(), p.digit.to_string(), p.x.to_string(), p.y.to_string()])?;
            }
            w.finish()?;
        }
    }
    if orbit.len() < steps {
        writeln!(err, "orbit reached x = 0 after {} steps", orbit.len())?;
    }
    Ok(())
}
