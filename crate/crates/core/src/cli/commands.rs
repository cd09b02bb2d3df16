use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{CliError, CommandKind, Format, ParamsConfig, RunConfig};
use crate::analysis::{
    convergence_csv, convergence_study, covariance_limit, covariance_sequence, unit_grid,
    voronovskaya_limit, voronovskaya_sequence, ErrorSurface,
};
use crate::bivariate::{BivariateOperator, Monomial};
use crate::field::ScalarField;
use crate::moduli::BoundCertifier;
use crate::univariate::{AffineVariant, OperatorKind, UnivariateOperator};

pub(super) fn execute(command: CommandKind, cfg: &RunConfig) -> Result<String, CliError> {
    match command {
        CommandKind::Eval => eval(cfg),
        CommandKind::Moments => moments(cfg),
        CommandKind::Surface => surface(cfg),
        CommandKind::Converge => converge(cfg),
        CommandKind::Voronovskaya => voronovskaya(cfg),
        CommandKind::Covariance => covariance(cfg),
        CommandKind::Bounds => bounds(cfg),
        CommandKind::Reproduce => unreachable!("handled by run"),
    }
}

fn function(cfg: &RunConfig) -> Result<ScalarField, CliError> {
    cfg.function
        .as_ref()
        .ok_or_else(|| CliError::Config("no function given".into()))?
        .resolve()
}

fn variant(cfg: &RunConfig) -> AffineVariant {
    if cfg.paper_ank {
        AffineVariant::Printed
    } else {
        AffineVariant::Derived
    }
}

fn to_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

fn params_json(p: &ParamsConfig) -> Value {
    serde_json::to_value(p).expect("params always serialize")
}

/// A header plus rows of already formatted fields.
struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(header: &'static [&'static str]) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), v.clone()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    fn render(&self, cfg: &RunConfig, extra: Value) -> String {
        match cfg.format {
            Format::Csv => self.csv(),
            Format::Json => {
                let mut doc = json!({
                    "params": params_json(&cfg.params),
                    "rows": self.json_rows(),
                });
                if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
                    d.extend(e);
                }
                to_json(&doc)
            }
        }
    }
}

// Floats print with Rust's shortest round-trip formatting.
fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => f.to_string(),
            _ => n.to_string(),
        },
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

fn num(v: f64) -> Value {
    // serde_json refuses non-finite numbers; those are reported as strings
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(v.to_string()), Value::Number)
}

fn eval(cfg: &RunConfig) -> Result<String, CliError> {
    let f = function(cfg)?;
    let (x, y) = (cfg.x, cfg.y);
    if f.is_bivariate() {
        let op = BivariateOperator::new(&cfg.params.bivariate()?)?;
        let value = op.bi_eval(&f, x, y)?;
        let mut t = Table::new(&["x", "y", "value", "exact", "abs_error"]);
        let exact = f.eval(x, y);
        t.push(vec![num(x), num(y), num(value), num(exact), num((value - exact).abs())]);
        Ok(t.render(cfg, json!({})))
    } else {
        let op = UnivariateOperator::new(&cfg.params.univariate()?)?;
        let k = op.k_eval(&f, x)?;
        let a = op.a_eval_variant(&f, x, variant(cfg))?;
        let mut t = Table::new(&["x", "k_value", "a_value", "exact"]);
        t.push(vec![num(x), num(k), num(a), num(f.eval1(x))]);
        Ok(t.render(cfg, json!({ "paper_ank": cfg.paper_ank })))
    }
}

/// Closed-form against quadrature moments. A monomial builtin selects one
/// moment; without a function every moment is listed.
fn moments(cfg: &RunConfig) -> Result<String, CliError> {
    let (x, y) = (cfg.x, cfg.y);
    let uni = UnivariateOperator::new(&cfg.params.univariate()?)?;
    let bi = BivariateOperator::new(&cfg.params.bivariate()?)?;

    let selected: Option<&str> = match &cfg.function {
        None => None,
        Some(super::FunctionSpec::Builtin(name)) => Some(name.as_str()),
        Some(super::FunctionSpec::Expr(_)) => {
            return Err(CliError::Config(
                "moments takes a monomial builtin (e0, e1, e2, e00, e10, e01, e20, e02) or none".into(),
            ))
        }
    };
    let univariate_names = ["e0", "e1", "e2"];
    let uni_js: Vec<u32> = match selected {
        None => vec![0, 1, 2],
        Some(name) => univariate_names
            .iter()
            .position(|n| *n == name)
            .map(|j| vec![j as u32])
            .unwrap_or_default(),
    };
    let bi_monos: Vec<Monomial> = match selected {
        None => Monomial::ALL.to_vec(),
        Some(name) => Monomial::ALL
            .iter()
            .copied()
            .filter(|m| m.name() == name)
            .collect(),
    };
    if uni_js.is_empty() && bi_monos.is_empty() {
        return Err(CliError::Config(format!(
            "moments takes a monomial builtin, got {:?}",
            selected.unwrap_or_default()
        )));
    }

    let mut t = Table::new(&["operator", "moment", "x", "y", "analytic", "numeric", "abs_diff"]);
    for &j in &uni_js {
        let f = ScalarField::builtin(univariate_names[j as usize]).expect("catalog entry");
        for (label, kind) in [("K", OperatorKind::K), ("A", OperatorKind::A)] {
            let analytic = uni.moment_analytic(kind, j, x)?;
            let numeric = match kind {
                OperatorKind::K => uni.k_eval(&f, x)?,
                OperatorKind::A => uni.a_eval_variant(&f, x, variant(cfg))?,
            };
            t.push(vec![
                label.into(),
                univariate_names[j as usize].into(),
                num(x),
                Value::String(String::new()),
                num(analytic),
                num(numeric),
                num((analytic - numeric).abs()),
            ]);
        }
    }
    for mono in bi_monos {
        let analytic = bi.moment_analytic(mono, x, y)?;
        let numeric = bi.bi_eval(&mono.field(), x, y)?;
        t.push(vec![
            "K2".into(),
            mono.name().into(),
            num(x),
            num(y),
            num(analytic),
            num(numeric),
            num((analytic - numeric).abs()),
        ]);
    }
    Ok(t.render(cfg, json!({ "paper_ank": cfg.paper_ank })))
}

pub(super) fn surface_summary(cfg: &ParamsConfig, s: &ErrorSurface) -> Value {
    json!({
        "params": params_json(cfg),
        "max_error": num(s.max_error()),
        "mean_error": num(s.mean_error()),
        "grid": s.xs.len(),
    })
}

fn surface(cfg: &RunConfig) -> Result<String, CliError> {
    let f = function(cfg)?;
    let op = BivariateOperator::new(&cfg.params.bivariate()?)?;
    let s = ErrorSurface::compute(&op, &f, cfg.grid)?;
    Ok(match cfg.format {
        Format::Csv => s.to_csv(),
        Format::Json => to_json(&surface_summary(&cfg.params, &s)),
    })
}

fn converge(cfg: &RunConfig) -> Result<String, CliError> {
    let f = function(cfg)?;
    let rows = convergence_study(&f, &cfg.params.bivariate()?, &cfg.ladder, cfg.grid)?;
    Ok(match cfg.format {
        Format::Csv => convergence_csv(&rows),
        Format::Json => {
            let list: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "n": r.n, "m": r.m, "max_error": num(r.max_error) }))
                .collect();
            to_json(&json!({
                "params": params_json(&cfg.params),
                "grid": cfg.grid,
                "rows": list,
                "max_error": num(rows.last().map_or(0.0, |r| r.max_error)),
            }))
        }
    })
}

fn voronovskaya(cfg: &RunConfig) -> Result<String, CliError> {
    let f = function(cfg)?;
    let p = cfg.params.bivariate()?;
    let limit = voronovskaya_limit(&f, cfg.x, cfg.y, p.beta1, p.beta2, cfg.fd_step)?;
    let seq = voronovskaya_sequence(&f, cfg.x, cfg.y, &p, &cfg.ladder)?;
    let mut t = Table::new(&["n", "m", "scaled_residual", "limit", "abs_diff"]);
    for (n, r) in seq {
        t.push(vec![n.into(), n.into(), num(r), num(limit), num((r - limit).abs())]);
    }
    Ok(t.render(cfg, json!({ "x": num(cfg.x), "y": num(cfg.y) })))
}

fn covariance(cfg: &RunConfig) -> Result<String, CliError> {
    let f = function(cfg)?;
    let g = cfg
        .second_function
        .as_ref()
        .ok_or_else(|| CliError::Config("no second function given".into()))?
        .resolve()?;
    let p = cfg.params.bivariate()?;
    let limit = covariance_limit(&f, &g, cfg.x, cfg.y, cfg.fd_step)?;
    let seq = covariance_sequence(&f, &g, cfg.x, cfg.y, &p, &cfg.ladder)?;
    let mut t = Table::new(&["n", "m", "scaled_value", "limit", "abs_diff"]);
    for (n, v) in seq {
        t.push(vec![n.into(), n.into(), num(v), num(limit), num((v - limit).abs())]);
    }
    Ok(t.render(cfg, json!({ "x": num(cfg.x), "y": num(cfg.y) })))
}

fn bounds(cfg: &RunConfig) -> Result<String, CliError> {
    let f = function(cfg)?;
    let op = BivariateOperator::new(&cfg.params.bivariate()?)?;
    let cert = BoundCertifier::new(&op, &f, cfg.modulus_grid)?;
    let mut t = Table::new(&[
        "x",
        "y",
        "actual_error",
        "bound_complete",
        "bound_partial",
        "bound_lipschitz",
        "theta",
        "mu",
        "second_modulus",
        "min_term",
        "first_modulus",
    ]);
    for &x in &unit_grid(cfg.probe) {
        for &y in &unit_grid(cfg.probe) {
            let complete = cert.complete(x, y)?;
            let partial = cert.partial(x, y)?;
            let lip = cert.lipschitz(cfg.lipschitz_m, cfg.gamma1, cfg.gamma2, x, y)?;
            let smooth = cert.smoothness(x, y)?;
            t.push(vec![
                num(x),
                num(y),
                num(complete.actual_error),
                num(complete.bound),
                num(partial.bound),
                num(lip.bound),
                num(smooth.theta),
                num(smooth.mu),
                num(smooth.second_modulus),
                num(smooth.min_term),
                num(smooth.first_modulus),
            ]);
        }
    }
    Ok(t.render(cfg, json!({ "grid": cfg.modulus_grid })))
}
