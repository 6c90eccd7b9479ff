//! Output records and their JSON and CSV renderings.
//!
//! Field order is fixed by the struct layout and maps are ordered, so the
//! same invocation always prints the same bytes.

use std::collections::BTreeMap;

use euler_series::{Error, Scalar};
use serde::Serialize;

use crate::args::Format;

#[derive(Debug, Clone, Serialize)]
pub struct TermRow {
    pub k: usize,
    pub term: String,
    pub partial_sum: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub k: usize,
    pub coefficient: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub input: BTreeMap<String, String>,
    pub mode: String,
    /// Absent in exact mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<CoefficientRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<String>>,
    /// Successive anchors of a refinement, starting with the first.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<BTreeMap<String, BTreeMap<String, String>>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
}

impl OutputRecord {
    pub fn new(command: &str, input: BTreeMap<String, String>, precision: Option<u32>) -> Self {
        OutputRecord {
            command: command.to_string(),
            input,
            mode: if precision.is_some() { "float" } else { "exact" }.to_string(),
            precision,
            ..Default::default()
        }
    }

    pub fn set_terms(&mut self, terms: &[Scalar], partial_sums: &[Scalar]) {
        self.terms = terms
            .iter()
            .zip(partial_sums)
            .enumerate()
            .map(|(k, (t, s))| TermRow { k, term: t.to_string(), partial_sum: s.to_string() })
            .collect();
    }

    /// Coefficients numbered from 1.
    pub fn set_coefficients(&mut self, coefficients: &[Scalar]) {
        self.coefficients = coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| CoefficientRow { k: i + 1, coefficient: c.to_string() })
            .collect();
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv if !self.terms.is_empty() => to_csv(&self.terms),
            Format::Csv if !self.coefficients.is_empty() => to_csv(&self.coefficients),
            Format::Csv => to_csv(&self.fields()),
        }
    }

    /// Flattened `field,value` pairs for CSV output of commands without
    /// a table.
    fn fields(&self) -> Vec<FieldRow> {
        let mut rows = vec![FieldRow::new("command", &self.command), FieldRow::new("mode", &self.mode)];
        if let Some(p) = self.precision {
            rows.push(FieldRow::new("precision", &p.to_string()));
        }
        rows.extend(self.input.iter().map(|(k, v)| FieldRow::new(&format!("input.{k}"), v)));
        if let Some(v) = &self.value {
            rows.push(FieldRow::new("value", v));
        }
        if let Some(v) = &self.verdict {
            rows.push(FieldRow::new("verdict", v));
        }
        rows.extend(self.trace.iter().enumerate().map(|(i, v)| FieldRow::new(&format!("trace.{i}"), v)));
        for (method, values) in self.oracle.iter().flatten() {
            rows.extend(values.iter().map(|(k, v)| FieldRow::new(&format!("oracle.{method}.{k}"), v)));
        }
        rows.extend(self.details.iter().map(|(k, v)| FieldRow::new(k, v)));
        rows
    }
}

#[derive(Debug, Serialize)]
struct FieldRow {
    field: String,
    value: String,
}

impl FieldRow {
    fn new(field: &str, value: &str) -> Self {
        FieldRow { field: field.to_string(), value: value.to_string() }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub command: String,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
}

impl ErrorRecord {
    pub fn new(command: &str, kind: &str, message: String) -> Self {
        ErrorRecord {
            command: command.to_string(),
            error: ErrorBody { kind: kind.to_string(), message, details: BTreeMap::new() },
        }
    }

    pub fn from_error(command: &str, e: &Error) -> Self {
        let mut record = ErrorRecord::new(command, e.kind(), e.to_string());
        let details = &mut record.error.details;
        match e {
            Error::Domain(kind) => {
                details.insert("domain".into(), format!("{kind:?}"));
            }
            Error::NotReversible { round: Some(r) } => {
                details.insert("round".into(), r.to_string());
            }
            Error::NoConvergence { last, iterations } => {
                details.insert("last".into(), last.to_string());
                details.insert("iterations".into(), iterations.to_string());
            }
            Error::DerivativeVanished { at } => {
                details.insert("at".into(), at.to_string());
            }
            Error::Syntax { position, .. } | Error::UnknownSymbol { position, .. } => {
                details.insert("position".into(), position.to_string());
            }
            _ => {}
        }
        record
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut rows = vec![
                    FieldRow::new("command", &self.command),
                    FieldRow::new("error", &self.error.kind),
                    FieldRow::new("message", &self.error.message),
                ];
                rows.extend(self.error.details.iter().map(|(k, v)| FieldRow::new(k, v)));
                to_csv(&rows)
            }
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("records serialize");
    text.push('\n');
    text
}

fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("records serialize");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("utf-8")
}
