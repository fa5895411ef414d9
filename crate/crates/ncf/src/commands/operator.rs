use std::io::Write;

use ncf_core::measures::rho_density;
use ncf_core::transfer_op::{
    apply_k_power, apply_s_power, apply_u_power, gauss_kuzmin_experiment, invariant_density_power_iteration,
    lipschitz_constant_q, lipschitz_contraction_check, variation_contraction_check, DensityPair, GridFunction,
    OperatorConfig,
};
use ncf_core::NcfParams;
use serde_json::{json, Value};

use super::parse_f64_list;
use crate::cli::{DensityArgs, DensityCommand, DensityKind, FunctionArgs, OperatorCommand, OperatorKind, SeriesArgs};
use crate::formats::{document, f64_json, CsvOut, Format, Report};
use crate::{CliError, CliResult, Context};

/// Slack used when reporting whether a contraction inequality holds.
const SLACK: f64 = 1e-6;

fn config(ctx: &Context, series: &SeriesArgs) -> CliResult<OperatorConfig> {
    Ok(OperatorConfig::new(ctx.params()?, ctx.grid, series.series_tol)?)
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| f64_json(x)).collect())
}

pub fn density_cmd(args: &DensityArgs, ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    if let Some(DensityCommand::Gk { x, steps, series }) = &args.command {
        return gk_cmd(x, *steps, series, ctx, out);
    }
    let cfg = config(ctx, &args.series)?;
    let params = cfg.params;
    let r = invariant_density_power_iteration(&cfg, args.max_iters, args.tol)?;
    let grid = &r.density;
    match ctx.format {
        Format::Json => {
            let rho: Vec<f64> = grid.nodes().map(|(x, _)| rho_density(x, params)).collect();
            let mut doc = document("density");
            doc.insert("N".into(), json!(params.n()));
            doc.insert("grid".into(), json!(grid.grid_size()));
            doc.insert("tol".into(), f64_json(args.tol));
            doc.insert("iterations".into(), json!(r.iterations));
            doc.insert("l1_to_rho".into(), f64_json(r.l1_to_rho));
            doc.insert("observed_rate".into(), f64_json(r.observed_rate));
            doc.insert("predicted_iterations".into(), f64_json(r.predicted_iterations));
            doc.insert("consistent_with_rate".into(), Value::Bool(r.consistent_with_rate()));
            doc.insert("diffs".into(), floats(&r.diffs));
            doc.insert("density".into(), floats(grid.values()));
            doc.insert("rho".into(), floats(&rho));
            crate::formats::write_json(out, &Value::Object(doc))?;
        }
        Format::Csv => {
            let mut w = CsvOut::new(out, &["x", "density", "rho"])?;
            for (x, v) in grid.nodes() {
                w.row([x.to_string(), v.to_string(), rho_density(x, params).to_string()])?;
            }
            w.finish()?;
            writeln!(
                err,
                "iterations={} l1_to_rho={} observed_rate={}",
                r.iterations, r.l1_to_rho, r.observed_rate
            )?;
        }
    }
    Ok(())
}

fn gk_cmd(x: &str, steps: usize, series: &SeriesArgs, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let cfg = config(ctx, series)?;
    let probes = parse_f64_list(x)?;
    let r = gauss_kuzmin_experiment(&probes, steps, &cfg)?;
    let monotone = r.rows.windows(2).all(|w| w[1].max_deviation <= w[0].max_deviation);
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for row in &r.rows {
        for (j, &p) in probes.iter().enumerate() {
            rows.push(vec![
                row.n.to_string(),
                p.to_string(),
                row.measure[j].to_string(),
                row.deviation[j].to_string(),
            ]);
        }
        json_rows.push(json!({
            "n": row.n,
            "measure": floats(&row.measure),
            "deviation": floats(&row.deviation),
            "max_deviation": f64_json(row.max_deviation),
        }));
    }
    let mut doc = document("density.gk");
    doc.insert("N".into(), json!(cfg.params.n()));
    doc.insert("grid".into(), json!(cfg.grid_size));
    doc.insert("probes".into(), floats(&probes));
    doc.insert("initial".into(), floats(&r.initial));
    doc.insert("rows".into(), Value::Array(json_rows));
    doc.insert("monotone_decreasing".into(), Value::Bool(monotone));
    doc.insert("budget".into(), f64_json(r.budget));
    let report = Report { json: Value::Object(doc), header: &["n", "x", "measure", "deviation"], rows };
    Ok(report.write(ctx.format, out)?)
}

/// The test function selected on the command line, sampled on the grid.
fn function(f: &FunctionArgs, grid: usize) -> CliResult<(GridFunction, String)> {
    if let Some(c) = f.recip_shift {
        if c.is_nan() || c <= 0.0 {
            return Err(CliError::Usage("--recip-shift must be positive".into()));
        }
        return Ok((GridFunction::from_fn(grid, |x| 1.0 / (x + c))?, format!("1/(x+{c})")));
    }
    let coeffs = parse_f64_list(&f.poly)?;
    let g = GridFunction::from_fn(grid, |x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c))?;
    Ok((g, format!("poly({})", f.poly)))
}

fn density_pair(kind: DensityKind, params: NcfParams, grid: usize) -> CliResult<DensityPair> {
    Ok(match kind {
        DensityKind::Rho => DensityPair::rho(params, grid)?,
        DensityKind::One => DensityPair::lebesgue(params, grid)?,
    })
}

pub fn run(cmd: &OperatorCommand, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let params = ctx.params()?;
    let report = match cmd {
        OperatorCommand::Apply { op, power, h, f, series } => {
            let cfg = config(ctx, series)?;
            let (g, label) = function(f, cfg.grid_size)?;
            let applied = match op {
                OperatorKind::U => apply_u_power(&g, *power, &cfg)?,
                OperatorKind::K => apply_k_power(&g, *power, &cfg)?,
                OperatorKind::S => apply_s_power(&g, &density_pair(*h, params, cfg.grid_size)?, *power, &cfg)?,
            };
            let r = &applied.function;
            let name = match op {
                OperatorKind::U => "U",
                OperatorKind::K => "K",
                OperatorKind::S => "S",
            };
            let mut doc = document("operator.apply");
            doc.insert("N".into(), json!(params.n()));
            doc.insert("op".into(), json!(name));
            doc.insert("power".into(), json!(power));
            if *op == OperatorKind::S {
                doc.insert("h".into(), json!(format!("{h:?}").to_lowercase()));
            }
            doc.insert("f".into(), json!(label));
            doc.insert("grid".into(), json!(cfg.grid_size));
            doc.insert("budget".into(), f64_json(applied.budget));
            doc.insert("terms".into(), json!(applied.terms));
            doc.insert("integral".into(), f64_json(r.integral()));
            doc.insert("variation".into(), f64_json(r.variation()));
            doc.insert("lipschitz".into(), f64_json(r.lipschitz_seminorm()));
            doc.insert("values".into(), floats(r.values()));
            let rows = g
                .nodes()
                .zip(r.values())
                .map(|((x, fx), v)| vec![x.to_string(), fx.to_string(), v.to_string()])
                .collect();
            Report { json: Value::Object(doc), header: &["x", "f", "value"], rows }
        }
        OperatorCommand::Variation { f, series } => {
            let cfg = config(ctx, series)?;
            let (g, label) = function(f, cfg.grid_size)?;
            let c = variation_contraction_check(&g, &cfg)?;
            let holds = c.holds(SLACK);
            let mut doc = document("operator.variation");
            doc.insert("N".into(), json!(params.n()));
            doc.insert("f".into(), json!(label));
            doc.insert("var_f".into(), f64_json(c.var_f));
            doc.insert("var_uf".into(), f64_json(c.var_uf));
            doc.insert("ratio".into(), f64_json(c.ratio));
            doc.insert("bound".into(), f64_json(c.bound));
            doc.insert("reversed".into(), Value::Bool(c.reversed));
            doc.insert("budget".into(), f64_json(c.budget));
            doc.insert("slack".into(), f64_json(SLACK));
            doc.insert("holds".into(), Value::Bool(holds));
            Report {
                json: Value::Object(doc),
                header: &["var_f", "var_uf", "ratio", "bound", "reversed", "holds"],
                rows: vec![vec![
                    c.var_f.to_string(),
                    c.var_uf.to_string(),
                    c.ratio.to_string(),
                    c.bound.to_string(),
                    c.reversed.to_string(),
                    holds.to_string(),
                ]],
            }
        }
        OperatorCommand::Lipschitz { f, series } => {
            let cfg = config(ctx, series)?;
            let (g, label) = function(f, cfg.grid_size)?;
            let q = lipschitz_constant_q(params, 1e-12)?;
            let c = lipschitz_contraction_check(&g, &cfg, q.value)?;
            let holds = c.holds(SLACK);
            let mut doc = document("operator.lipschitz");
            doc.insert("N".into(), json!(params.n()));
            doc.insert("f".into(), json!(label));
            doc.insert("s_f".into(), f64_json(c.s_f));
            doc.insert("s_uf".into(), f64_json(c.s_uf));
            doc.insert("q".into(), f64_json(c.q));
            doc.insert("excess".into(), f64_json(c.excess));
            doc.insert("slack".into(), f64_json(SLACK));
            doc.insert("holds".into(), Value::Bool(holds));
            Report {
                json: Value::Object(doc),
                header: &["s_f", "s_uf", "q", "excess", "holds"],
                rows: vec![vec![
                    c.s_f.to_string(),
                    c.s_uf.to_string(),
                    c.q.to_string(),
                    c.excess.to_string(),
                    holds.to_string(),
                ]],
            }
        }
        OperatorCommand::Q { tol } => {
            let q = lipschitz_constant_q(params, *tol)?;
            let mut doc = document("operator.q");
            doc.insert("N".into(), json!(params.n()));
            doc.insert("q".into(), f64_json(q.value));
            doc.insert("radius".into(), f64_json(q.radius));
            doc.insert("terms".into(), json!(q.terms));
            Report {
                json: Value::Object(doc),
                header: &["q", "radius", "terms"],
                rows: vec![vec![q.value.to_string(), q.radius.to_string(), q.terms.to_string()]],
            }
        }
    };
    Ok(report.write(ctx.format, out)?)
}
