use std::collections::HashSet;

use macroq::states::StateSpec;
use serde::{Deserialize, Serialize};

use crate::measure::MeasureSpec;
use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEntry {
    pub id: String,
    #[serde(flatten)]
    pub spec: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    /// Row label; defaults to the measure kind.
    #[serde(default)]
    pub label: Option<String>,
    /// State ids the measure runs on; all states when absent.
    #[serde(default)]
    pub states: Option<Vec<String>>,
    #[serde(flatten)]
    pub spec: MeasureSpec,
}

impl MeasureEntry {
    pub fn name(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.spec.kind().to_string())
    }

    pub fn applies_to(&self, state_id: &str) -> bool {
        self.states.as_ref().is_none_or(|ids| ids.iter().any(|i| i == state_id))
    }
}

/// One state parameter stepped over a list of values. Without `state`, every
/// state of the manifest is swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<toml::Value>,
    #[serde(default)]
    pub state: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub states: Vec<StateEntry>,
    #[serde(default)]
    pub measures: Vec<MeasureEntry>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
}

/// A state at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub state_index: usize,
    pub point_index: usize,
    pub state_id: String,
    pub param_name: String,
    pub param_value: Option<f64>,
    pub spec: StateSpec,
}

impl RunManifest {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let m: RunManifest = toml::from_str(text).map_err(|e| CliError::Manifest(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Manifest(msg) => CliError::Manifest(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for s in &self.states {
            if !ids.insert(s.id.as_str()) {
                return Err(CliError::Manifest(format!("duplicate state id `{}`", s.id)));
            }
        }
        for m in &self.measures {
            for id in m.states.iter().flatten() {
                if !ids.contains(id.as_str()) {
                    return Err(CliError::Manifest(format!("measure `{}` refers to unknown state `{id}`", m.name())));
                }
            }
        }
        self.points().map(|_| ())
    }

    /// Every (state, sweep point) pair in row order.
    pub fn points(&self) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        if let Some(sw) = &self.sweep {
            if let Some(id) = &sw.state {
                if !self.states.iter().any(|s| &s.id == id) {
                    return Err(CliError::Manifest(format!("sweep refers to unknown state `{id}`")));
                }
            }
            if sw.values.is_empty() {
                return Err(CliError::Manifest("sweep has no values".into()));
            }
        }
        for (si, entry) in self.states.iter().enumerate() {
            let swept = self.sweep.as_ref().filter(|sw| sw.state.as_ref().is_none_or(|id| id == &entry.id));
            match swept {
                None => out.push(Point {
                    state_index: si,
                    point_index: 0,
                    state_id: entry.id.clone(),
                    param_name: String::new(),
                    param_value: None,
                    spec: entry.spec.clone(),
                }),
                Some(sw) => {
                    for (pi, v) in sw.values.iter().enumerate() {
                        out.push(Point {
                            state_index: si,
                            point_index: pi,
                            state_id: entry.id.clone(),
                            param_name: sw.param.clone(),
                            param_value: Some(numeric(v, &sw.param)?),
                            spec: substitute(&entry.id, &entry.spec, &sw.param, v)?,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

fn numeric(v: &toml::Value, param: &str) -> Result<f64> {
    match v {
        toml::Value::Integer(i) => Ok(*i as f64),
        toml::Value::Float(x) => Ok(*x),
        other => Err(CliError::Manifest(format!("sweep value {other} for `{param}` is not a number"))),
    }
}

/// `spec` with `param` replaced by `value`; the parameter must already be set.
pub fn substitute(id: &str, spec: &StateSpec, param: &str, value: &toml::Value) -> Result<StateSpec> {
    let mut table = match toml::Value::try_from(spec) {
        Ok(toml::Value::Table(t)) => t,
        _ => return Err(CliError::Manifest(format!("state `{id}` cannot be swept"))),
    };
    if param == "kind" || !table.contains_key(param) {
        return Err(CliError::Manifest(format!(
            "sweep parameter `{param}` does not exist in state `{id}` (kind {})",
            spec.kind()
        )));
    }
    table.insert(param.to_string(), value.clone());
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| CliError::Manifest(format!("state `{id}` with {param} = {value}: {e}")))
}
