use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{OutputFormat, Result};

pub const CSV_HEADER: [&str; 8] =
    ["state_id", "param_name", "param_value", "measure", "value", "error_estimate", "method", "seconds"];

const ERROR_PREFIX: &str = "error: ";

/// One evaluated (state, sweep point, measure) triple. A failed evaluation
/// has `error` set and no value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub state_id: String,
    pub param_name: String,
    pub param_value: Option<f64>,
    pub measure: String,
    pub value: Option<f64>,
    pub error_estimate: Option<f64>,
    pub method: String,
    pub seconds: f64,
    #[serde(default)]
    pub error: Option<String>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl ReportRow {
    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }
}

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.8e}")).unwrap_or_default()
}

fn parse_num(field: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| crate::CliError::Manifest(format!("bad number `{field}` in report")))
}

/// CSV with the fixed column set; an error row carries `error: <message>` in
/// the method column. Metadata is not written.
pub fn write_csv(rows: &[ReportRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let method = match &r.error {
            Some(e) => format!("{ERROR_PREFIX}{e}"),
            None => r.method.clone(),
        };
        w.write_record([
            r.state_id.clone(),
            r.param_name.clone(),
            num(r.param_value),
            r.measure.clone(),
            num(r.value),
            num(r.error_estimate),
            method,
            format!("{:.6e}", r.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<ReportRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(crate::CliError::Manifest(format!("unexpected report header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let method = rec[6].to_string();
        let (method, error) = match method.strip_prefix(ERROR_PREFIX) {
            Some(e) => (String::new(), Some(e.to_string())),
            None => (method, None),
        };
        rows.push(ReportRow {
            state_id: rec[0].to_string(),
            param_name: rec[1].to_string(),
            param_value: parse_num(&rec[2])?,
            measure: rec[3].to_string(),
            value: parse_num(&rec[4])?,
            error_estimate: parse_num(&rec[5])?,
            method,
            seconds: parse_num(&rec[7])?.unwrap_or(0.0),
            error,
            metadata: BTreeMap::new(),
        });
    }
    Ok(rows)
}

pub fn write_json(rows: &[ReportRow], mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json(input: impl Read) -> Result<Vec<ReportRow>> {
    Ok(serde_json::from_reader(input)?)
}

pub fn write_rows(rows: &[ReportRow], format: OutputFormat, out: impl Write) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, out),
    }
}

pub fn read_rows(format: OutputFormat, input: impl Read) -> Result<Vec<ReportRow>> {
    match format {
        OutputFormat::Csv => read_csv(input),
        OutputFormat::Json => read_json(input),
    }
}
