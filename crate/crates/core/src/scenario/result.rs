//! Labeled numeric series produced by campaigns.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// One named column of reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// A campaign output: equally long named columns plus enough metadata to
/// re-run the campaign bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub columns: Vec<Column>,
    pub metadata: BTreeMap<String, String>,
}

impl ScenarioResult {
    pub fn new(name: impl Into<String>, metadata: BTreeMap<String, String>) -> Self {
        Self {
            name: name.into(),
            columns: Vec::new(),
            metadata,
        }
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.columns.push(Column {
            name: name.into(),
            values,
        });
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    /// Checks the column invariants: unique names, equal lengths.
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.columns.iter().enumerate() {
            if self.columns[..i].iter().any(|other| other.name == c.name) {
                return Err(Error::AssertionFailed(format!(
                    "duplicate column name '{}' in result '{}'",
                    c.name, self.name
                )));
            }
        }
        let n = self.n_rows();
        if let Some(bad) = self.columns.iter().find(|c| c.values.len() != n) {
            return Err(Error::AssertionFailed(format!(
                "column '{}' has {} rows, expected {} in result '{}'",
                bad.name,
                bad.values.len(),
                n,
                self.name
            )));
        }
        Ok(())
    }
}
