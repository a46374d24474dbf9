use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Scalar result of a measure evaluation together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub value: f64,
    pub method: String,
    pub error_estimate: f64,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl MeasureReport {
    pub fn new(value: f64, method: impl Into<String>, error_estimate: f64) -> Self {
        Self {
            value,
            method: method.into(),
            error_estimate,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}
