//! Verification reports: rows of predicted/measured pairs with a pass flag.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Exact(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub predicted: Quantity,
    pub measured: Quantity,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub pass: bool,
    /// Where the predicted value comes from.
    pub provenance: String,
}

impl Row {
    /// Exact comparison of two rendered values.
    pub fn exact(
        name: impl Into<String>,
        predicted: impl Into<String>,
        measured: impl Into<String>,
        provenance: &str,
    ) -> Row {
        let (p, m) = (predicted.into(), measured.into());
        Row {
            name: name.into(),
            pass: p == m,
            predicted: Quantity::Exact(p),
            measured: Quantity::Exact(m),
            abs_err: None,
            rel_err: None,
            provenance: provenance.into(),
        }
    }

    /// Passes when the relative error is at most `tol`.
    pub fn relative(name: impl Into<String>, predicted: f64, measured: f64, tol: f64, provenance: &str) -> Row {
        let abs = (measured - predicted).abs();
        let rel = abs / predicted.abs();
        Row {
            name: name.into(),
            predicted: Quantity::Number(predicted),
            measured: Quantity::Number(measured),
            abs_err: Some(abs),
            rel_err: Some(rel),
            pass: rel <= tol,
            provenance: provenance.into(),
        }
    }

    /// Passes when `measured <= bound`.
    pub fn bound(name: impl Into<String>, bound: f64, measured: f64, provenance: &str) -> Row {
        Row {
            name: name.into(),
            predicted: Quantity::Number(bound),
            measured: Quantity::Number(measured),
            abs_err: Some(measured.abs()),
            rel_err: None,
            pass: measured <= bound,
            provenance: provenance.into(),
        }
    }

    /// A yes/no property; `expected` is what a correct pipeline reports.
    pub fn flag(name: impl Into<String>, expected: bool, observed: bool, provenance: &str) -> Row {
        Row::exact(name, expected.to_string(), observed.to_string(), provenance)
    }

    /// A pipeline that raised instead of producing a value.
    pub fn error(name: impl Into<String>, err: &Error, provenance: &str) -> Row {
        Row {
            name: name.into(),
            predicted: Quantity::Exact("value".into()),
            measured: Quantity::Exact(format!("error: {err}")),
            abs_err: None,
            rel_err: None,
            pass: false,
            provenance: provenance.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub inputs: Value,
    pub rows: Vec<Row>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Computed objects (root tables, cascades) echoed for inspection.
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl ReportDocument {
    pub fn new(command: &str, inputs: Value, rows: Vec<Row>) -> Self {
        ReportDocument {
            command: command.into(),
            inputs,
            pass: rows.iter().all(|r| r.pass),
            rows,
            notes: Vec::new(),
            data: Value::Null,
        }
    }

    pub fn with_data(mut self, data: Value) -> Self {
        self.data = data;
        self
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> Self {
        self.notes = notes;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let v = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        validate(&v)?;
        serde_json::to_string_pretty(&v).map_err(|e| Error::Config(e.to_string()))
    }

    /// Plain-text table.
    pub fn render_table(&self) -> String {
        let show = |q: &Quantity| match q {
            Quantity::Number(x) => format!("{x:.6e}"),
            Quantity::Exact(s) => s.clone(),
        };
        let mut out = format!("{}: {}\n", self.command, if self.pass { "PASS" } else { "FAIL" });
        for r in &self.rows {
            out.push_str(&format!(
                "  [{}] {}  predicted={}  measured={}\n",
                if r.pass { "ok" } else { "FAIL" },
                r.name,
                show(&r.predicted),
                show(&r.measured)
            ));
        }
        out
    }
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Invariant(format!("report {ctx} lacks '{key}'")))
}

fn is_quantity(v: &Value) -> bool {
    v.is_number() || v.is_string()
}

fn is_opt_number(v: &Value) -> bool {
    v.is_null() || v.is_number()
}

/// Structural check against the published report schema.
pub fn validate(v: &Value) -> Result<()> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Invariant("report is not an object".into()))?;
    if !field(obj, "command", "")?.is_string() {
        return Err(Error::Invariant("'command' must be a string".into()));
    }
    field(obj, "inputs", "")?;
    let pass = field(obj, "pass", "")?
        .as_bool()
        .ok_or_else(|| Error::Invariant("'pass' must be a boolean".into()))?;
    let rows = field(obj, "rows", "")?
        .as_array()
        .ok_or_else(|| Error::Invariant("'rows' must be an array".into()))?;
    let mut all = true;
    for (i, r) in rows.iter().enumerate() {
        let ctx = format!("row {i}");
        let r = r
            .as_object()
            .ok_or_else(|| Error::Invariant(format!("{ctx} is not an object")))?;
        let ok = field(r, "name", &ctx)?.is_string()
            && is_quantity(field(r, "predicted", &ctx)?)
            && is_quantity(field(r, "measured", &ctx)?)
            && is_opt_number(field(r, "abs_err", &ctx)?)
            && is_opt_number(field(r, "rel_err", &ctx)?)
            && field(r, "provenance", &ctx)?.as_str().is_some_and(|s| !s.is_empty());
        let p = field(r, "pass", &ctx)?
            .as_bool()
            .ok_or_else(|| Error::Invariant(format!("{ctx}: 'pass' must be a boolean")))?;
        if !ok {
            return Err(Error::Invariant(format!("{ctx} has a malformed field")));
        }
        all &= p;
    }
    if all != pass {
        return Err(Error::Invariant("'pass' disagrees with the rows".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn pass_is_conjunction_and_validates() {
        let doc = ReportDocument::new(
            "t",
            json!({}),
            vec![
                Row::relative("a", 1.0, 1.0 + 1e-9, 1e-6, "oracle"),
                Row::exact("b", "1/2", "1/2", "exact"),
            ],
        );
        assert!(doc.pass);
        let s = doc.to_json().unwrap();
        let back: ReportDocument = serde_json::from_str(&s).unwrap();
        assert_eq!(back, doc);
        let bad = ReportDocument::new("t", json!({}), vec![Row::bound("c", 1e-3, 0.5, "bound")]);
        assert!(!bad.pass);
    }

    #[test]
    fn malformed_reports_rejected() {
        assert!(validate(&json!({"command": "x", "inputs": {}, "rows": [], "pass": false})).is_err());
        assert!(validate(&json!({"command": "x", "inputs": {}, "rows": [{"name": "r"}], "pass": true})).is_err());
        assert!(validate(&json!({"command": 1, "inputs": {}, "rows": [], "pass": true})).is_err());
    }

    #[test]
    fn published_schema_lists_the_checked_fields() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json");
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        let top: Vec<&str> = schema["required"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap())
            .collect();
        assert_eq!(top, ["command", "inputs", "rows", "pass"]);
        let row = &schema["properties"]["rows"]["items"]["required"];
        let doc = ReportDocument::new("t", json!({}), vec![Row::exact("a", "1", "1", "x")]);
        let v = serde_json::to_value(&doc).unwrap();
        for k in row.as_array().unwrap() {
            assert!(v["rows"][0].get(k.as_str().unwrap()).is_some(), "{k}");
        }
    }
}
