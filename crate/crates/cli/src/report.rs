//! Output documents: JSON for everything, CSV for row-shaped results.

use std::collections::BTreeMap;

use nvmix::shapecheck::{CurvatureWitness, UnimodalCertificate};
use serde_json::{json, Map, Value};

/// JSON number, or a string for the non-finite values JSON cannot hold.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// A classification together with the rule that produced it. `None`
/// means the rule makes no claim for these inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    pub name: &'static str,
    pub value: Option<bool>,
    pub rule: &'static str,
}

impl Flag {
    pub fn new(name: &'static str, value: bool, rule: &'static str) -> Self {
        Flag { name, value: Some(value), rule }
    }

    pub fn json(&self) -> Value {
        json!({ "value": self.value, "rule": self.rule })
    }
}

pub fn flags_json(flags: &[Flag]) -> Value {
    Value::Object(flags.iter().map(|f| (f.name.to_string(), f.json())).collect())
}

/// One grid verification set against what the rule predicts.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub rule: &'static str,
    /// What the rule says; `None` when it says nothing here.
    pub predicted: Option<bool>,
    /// Whether the property held on the grid.
    pub observed: bool,
    /// The observation settles the property both ways (not merely "no
    /// violation found on this grid").
    pub decisive: bool,
    pub witness: Value,
}

impl Check {
    /// A guaranteed property failed, or a decisive observation
    /// contradicts the rule.
    pub fn contradicts(&self) -> bool {
        match self.predicted {
            Some(true) => !self.observed,
            Some(false) => self.decisive && self.observed,
            None => false,
        }
    }

    pub fn json(&self) -> Value {
        json!({
            "status": if self.observed { "pass" } else { "fail" },
            "predicted": self.predicted,
            "decisive": self.decisive,
            "consistent": !self.contradicts(),
            "rule": self.rule,
            "witness": self.witness,
        })
    }
}

pub fn unimodal_witness(cert: &UnimodalCertificate<f64>) -> Value {
    match &cert.witness {
        None => Value::Null,
        Some(w) => json!({
            "level": w.level.map(num),
            "dip_index": w.dip_index,
            "dip_x": w.dip_x.map(num),
            "level_route": cert.level_route,
            "direct_route": cert.direct_route,
        }),
    }
}

pub fn curvature_witness(w: &Option<CurvatureWitness<f64>>) -> Value {
    match w {
        None => Value::Null,
        Some(w) => json!({ "index": w.index, "x": num(w.x), "second_difference": num(w.second_difference) }),
    }
}

/// Rows with named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }

    pub fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            w.write_record(&cells).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

/// What a command produced, before it is wrapped into a document.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub results: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
    pub rule_citations: BTreeMap<String, String>,
    /// Row-shaped output for `eval` and `sweep`.
    pub table: Option<Table>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn cite(&mut self, flags: &[Flag]) {
        for f in flags {
            self.rule_citations.insert(f.name.to_string(), f.rule.to_string());
        }
    }

    pub fn add_check(&mut self, c: Check) {
        self.rule_citations.insert(c.name.to_string(), c.rule.to_string());
        self.checks.push(c);
    }

    pub fn certification_failed(&self) -> bool {
        self.checks.iter().any(Check::contradicts)
    }
}
