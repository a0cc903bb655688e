//! Side-by-side comparison of two metrics or null-test reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use bfmn_core::metrics::Metric;
use bfmn_core::report::{canonical_json, sig6};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// One metric as read from a report. Plain metrics reports only carry the
/// empirical value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entry {
    pub empirical: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: String,
    pub entries: BTreeMap<String, Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub metric: String,
    pub a: Entry,
    pub b: Entry,
    /// `b.empirical - a.empirical`.
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub rows: Vec<Row>,
}

fn number(v: &Value, what: &str) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| {
        CliError::validation("UnrecognizedReport", format!("{what} is not a number"))
    })
}

/// Accepts `nulltest.json` (a `tests` array) or `metrics.json`.
pub fn parse_report(text: &str, fallback_name: &str) -> Result<Report, CliError> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| CliError::validation("UnrecognizedReport", e.to_string()))?;
    let name = doc
        .get("network")
        .and_then(Value::as_str)
        .unwrap_or(fallback_name)
        .to_string();
    let mut entries = BTreeMap::new();
    if let Some(tests) = doc.get("tests").and_then(Value::as_array) {
        for t in tests {
            let metric = t["metric"].as_str().ok_or_else(|| {
                CliError::validation(
                    "UnrecognizedReport",
                    "null-test entry without a metric name",
                )
            })?;
            entries.insert(
                metric.to_string(),
                Entry {
                    empirical: number(&t["empirical"], "empirical")?,
                    ensemble_mean: Some(number(&t["ensemble_mean"], "ensemble_mean")?),
                    p_value: Some(number(&t["p_value"], "p_value")?),
                },
            );
        }
    } else if doc.is_object() && Metric::ALL.iter().any(|m| doc.get(m.name()).is_some()) {
        for m in Metric::ALL {
            if let Some(v) = doc.get(m.name()) {
                entries.insert(
                    m.name().to_string(),
                    Entry {
                        empirical: number(v, m.name())?,
                        ensemble_mean: None,
                        p_value: None,
                    },
                );
            }
        }
    } else {
        return Err(CliError::validation(
            "UnrecognizedReport",
            "expected a metrics report or a null-test report",
        ));
    }
    Ok(Report { name, entries })
}

/// Default report name: the cohort directory holding the file.
pub fn default_name(path: &Path) -> String {
    path.parent()
        .and_then(Path::file_name)
        .or_else(|| path.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into())
}

fn metric_order(name: &str) -> (usize, String) {
    let rank = Metric::ALL
        .iter()
        .position(|m| m.name() == name)
        .unwrap_or(Metric::ALL.len());
    (rank, name.to_string())
}

pub fn compare(a: &Report, b: &Report) -> Result<Comparison, CliError> {
    let names_a: Vec<&String> = a.entries.keys().collect();
    let names_b: Vec<&String> = b.entries.keys().collect();
    if names_a != names_b {
        return Err(CliError::validation(
            "MetricMismatch",
            format!(
                "{} has metrics {names_a:?}, {} has {names_b:?}",
                a.name, b.name
            ),
        ));
    }
    let mut metrics: Vec<&String> = names_a;
    metrics.sort_by_key(|m| metric_order(m));
    let rows = metrics
        .into_iter()
        .map(|m| {
            let (ea, eb) = (a.entries[m], b.entries[m]);
            Row {
                metric: m.clone(),
                a: ea,
                b: eb,
                difference: sig6(eb.empirical - ea.empirical),
            }
        })
        .collect();
    Ok(Comparison {
        a: a.name.clone(),
        b: b.name.clone(),
        rows,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3}"))
}

fn p_cell(v: Option<f64>) -> String {
    match v {
        Some(p) if p < 0.001 => "<.001".into(),
        other => cell(other),
    }
}

impl Comparison {
    /// Fixed-width table: for each report its empirical value, ensemble
    /// mean and p-value, then the difference of the empirical values.
    pub fn to_text(&self) -> String {
        let header = vec![
            "metric".to_string(),
            format!("{} empirical", self.a),
            "mean".into(),
            "p".into(),
            format!("{} empirical", self.b),
            "mean".into(),
            "p".into(),
            "difference".into(),
        ];
        let mut rows = vec![header];
        for r in &self.rows {
            rows.push(vec![
                r.metric.clone(),
                cell(Some(r.a.empirical)),
                cell(r.a.ensemble_mean),
                p_cell(r.a.p_value),
                cell(Some(r.b.empirical)),
                cell(r.b.ensemble_mean),
                p_cell(r.b.p_value),
                cell(Some(r.difference)),
            ]);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(v, w)| format!("{v:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(canonical_json(self)?)
    }
}
