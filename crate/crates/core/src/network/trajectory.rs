use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard statistics gathered while integrating.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub steps: usize,
    pub dt: f64,
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    /// Maximum top-Fock-level population per monitored subsystem.
    pub leakage: Vec<(usize, f64)>,
}

/// Time grid with named observable columns.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.times.len() {
            return Err(Error::InvalidSelection(format!(
                "column `{name}` has {} rows, time grid has {}",
                values.len(),
                self.times.len()
            )));
        }
        if self.column(&name).is_some() {
            return Err(Error::InvalidSelection(format!("duplicate column `{name}`")));
        }
        self.columns.push((name, values));
        Ok(())
    }

    /// Checks the strictly-increasing grid and equal column lengths.
    pub fn validate(&self) -> Result<()> {
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSelection("time grid is not strictly increasing".into()));
        }
        for (name, col) in &self.columns {
            if col.len() != self.times.len() {
                return Err(Error::InvalidSelection(format!("column `{name}` length mismatch")));
            }
        }
        Ok(())
    }

    pub fn max_leakage(&self) -> f64 {
        self.meta.leakage.iter().map(|&(_, v)| v).fold(0.0, f64::max)
    }
}
