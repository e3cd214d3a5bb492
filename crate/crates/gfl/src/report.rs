//! JSON reports and their CSV mirrors. Every file carries the resolved
//! configuration so a report can be rerun from itself.

use serde_json::{json, Map, Value};

use gfl_core::specifications::ValidationReport;
use gfl_core::{Result, Scalar};

use crate::config::ExperimentConfig;

/// A command's files (name, contents), stdout summary and exit code.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub summary: String,
    pub exit: i32,
}

impl Output {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }
}

pub fn header(command: &str, config: &ExperimentConfig, mode: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("mode".into(), json!(mode));
    m.insert("config".into(), config.to_json());
    m
}

pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

pub fn num<S: Scalar>(v: &S) -> Value {
    json!(v.render())
}

pub fn opt_num<S: Scalar>(v: Option<&S>) -> Value {
    v.map(num).unwrap_or(Value::Null)
}

pub fn f64_value(v: f64) -> Value {
    json!(gfl_core::scalar::render_f64(v))
}

/// CSV text preceded by `# key=value` lines.
pub struct Csv {
    comments: Vec<(String, String)>,
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new(comments: &[(&str, &str)], columns: &[&str]) -> Result<Csv> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(columns).map_err(csv_error)?;
        Ok(Csv {
            comments: comments.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            writer,
        })
    }

    pub fn with_config(config: &ExperimentConfig, extra: &[(&str, &str)], columns: &[&str]) -> Result<Csv> {
        let mut comments: Vec<(&str, &str)> = config.entries().collect();
        comments.extend_from_slice(extra);
        Csv::new(&comments, columns)
    }

    pub fn row<I, T>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(csv_error)
    }

    pub fn finish(self) -> Result<String> {
        let body = self.writer.into_inner().map_err(|e| gfl_core::Error::Argument(e.to_string()))?;
        let mut out = String::new();
        for (k, v) in &self.comments {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&String::from_utf8(body).expect("csv of utf-8 fields is utf-8"));
        Ok(out)
    }
}

fn csv_error(e: csv::Error) -> gfl_core::Error {
    gfl_core::Error::Argument(format!("csv: {e}"))
}

/// Listed violations are capped in JSON; the count is always complete.
pub const JSON_VIOLATIONS: usize = 20;

pub fn validation_json(r: &ValidationReport, seed: Option<u64>) -> Value {
    json!({
        "axiom": r.axiom,
        "passed": r.passed(),
        "fixtures_checked": r.fixtures_checked,
        "population": r.population.to_string(),
        "exhaustive": r.exhaustive,
        "seed": seed,
        "violation_count": r.violation_count,
        "max_residual": f64_value(r.max_residual),
        "violations": r.violations.iter().take(JSON_VIOLATIONS).map(|v| json!({
            "fixture": v.fixture,
            "detail": v.detail,
            "residual": f64_value(v.residual),
        })).collect::<Vec<_>>(),
    })
}

/// First differing line between two texts, for golden comparisons.
pub fn first_difference(expected: &str, actual: &str) -> Option<String> {
    let (mut e, mut a) = (expected.lines(), actual.lines());
    let mut line = 1;
    loop {
        match (e.next(), a.next()) {
            (None, None) => return None,
            (x, y) if x == y => line += 1,
            (x, y) => {
                return Some(format!(
                    "line {line}:\n  expected: {}\n  actual:   {}",
                    x.unwrap_or("<end of file>"),
                    y.unwrap_or("<end of file>")
                ))
            }
        }
    }
}
