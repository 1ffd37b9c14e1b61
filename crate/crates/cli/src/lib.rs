//! Command-line front end: evaluation, sampling, mode finding, shape
//! classification, grid certification and parameter sweeps.
//!
//! [`run`] turns a validated [`RunConfig`] into an exit code and a
//! document. Documents are JSON objects with the keys `command`,
//! `params`, `results`, `diagnostics` and `rule_citations`, or CSV for
//! `eval` and `sweep`. Keys are sorted and samples come from a seeded
//! ChaCha8 stream, so a repeated run reproduces its output byte for byte.

// `!(x > y)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod model;
pub mod report;

use serde_json::{json, Map, Value};

pub use config::{Command, ConfigError, Family, Grid, Output, ParamValue, RunConfig, Sweep};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CERTIFICATION_FAILED: i32 = 2;

/// A run that could not produce results: bad parameter values, an
/// unreadable table, or a numerical routine that gave up.
#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub field: String,
    pub message: String,
}

impl RunError {
    pub(crate) fn field(field: &str, message: impl Into<String>) -> Self {
        RunError { field: field.to_string(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub document: String,
}

fn params_json(cfg: &RunConfig) -> Value {
    let mut m = Map::new();
    m.insert("family".into(), json!(cfg.family.name()));
    if let Some(s) = &cfg.subfamily {
        m.insert("subfamily".into(), json!(s));
    }
    for (k, v) in &cfg.params {
        let v = match v {
            ParamValue::Scalar(x) => report::num(*x),
            ParamValue::Vector(xs) => report::nums(xs),
            ParamValue::Matrix(rows) => Value::Array(rows.iter().map(|r| report::nums(r)).collect()),
            ParamValue::Text(s) => json!(s),
        };
        m.insert(k.clone(), v);
    }
    if let Some(g) = cfg.grid {
        m.insert("grid".into(), json!({ "lo": report::num(g.lo), "hi": report::num(g.hi), "n": g.n }));
    }
    if let Some(s) = cfg.seed {
        m.insert("seed".into(), json!(s));
    }
    if let Some(s) = &cfg.sweep {
        m.insert("sweep".into(), json!({ "param": s.param, "lo": report::num(s.lo), "hi": report::num(s.hi), "n": s.n }));
    }
    if cfg.command == Command::Sample {
        m.insert("count".into(), json!(cfg.count));
    }
    if !cfg.tolerances.is_empty() {
        m.insert("tolerances".into(), json!(cfg.tolerances));
    }
    Value::Object(m)
}

fn document(cfg: &RunConfig, results: Value, diagnostics: Map<String, Value>, citations: Value) -> String {
    let doc = json!({
        "command": cfg.command.name(),
        "params": params_json(cfg),
        "results": results,
        "diagnostics": diagnostics,
        "rule_citations": citations,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("documents hold only JSON values");
    s.push('\n');
    s
}

/// Runs one command. Exit codes: 0 success, 1 invalid parameters or a
/// failed computation, 2 when a certification check contradicts its rule.
pub fn run(cfg: &RunConfig) -> RunOutcome {
    let outcome = commands::run_command(cfg);
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            let mut diag = Map::new();
            diag.insert("error".into(), json!({ "field": e.field, "message": e.message }));
            return RunOutcome { exit_code: EXIT_INVALID, document: document(cfg, Value::Null, diag, json!({})) };
        }
    };
    let exit_code = if report.certification_failed() { EXIT_CERTIFICATION_FAILED } else { EXIT_OK };
    if cfg.output == Output::Csv {
        let table = report.table.as_ref().expect("csv is only accepted for row-shaped commands");
        return RunOutcome { exit_code, document: table.csv() };
    }
    let mut results = report.results;
    if let Some(t) = &report.table {
        results.insert("table".into(), t.json());
    }
    RunOutcome { exit_code, document: document(cfg, Value::Object(results), report.diagnostics, json!(report.rule_citations)) }
}

/// Parses arguments (without the program name) and runs them.
pub fn run_args<I, S>(args: I) -> RunOutcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::from_args(args) {
        Ok(cfg) => run(&cfg),
        Err(ConfigError::Help(text)) => RunOutcome { exit_code: EXIT_OK, document: text },
        Err(ConfigError::Invalid { field, message }) => {
            let doc = json!({ "error": { "field": field, "message": message } });
            RunOutcome { exit_code: EXIT_INVALID, document: format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain JSON")) }
        }
    }
}
