//! Time series produced by both engines.

use serde::{Deserialize, Serialize};

/// A named per-sample diagnostic column (trace drift, bond dimension, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceColumn {
    pub name: String,
    pub values: Vec<f64>,
}

/// Run-level summary of the conservation and truncation diagnostics.
///
/// Fields that do not apply to an engine are left as `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermiticity_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excitation_drift: Option<f64>,
    /// Largest population found in Fock levels above two.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_leakage: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step_discarded_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulative_discarded_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bond_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub times: Vec<f64>,
    /// Excited-state population of the initial qubit.
    pub f1: Vec<f64>,
    /// Excited-state population of the target qubit.
    pub f2: Vec<f64>,
    pub columns: Vec<TraceColumn>,
    pub diagnostics: Diagnostics,
}

impl RunResult {
    pub fn new() -> Self {
        RunResult {
            times: Vec::new(),
            f1: Vec::new(),
            f2: Vec::new(),
            columns: Vec::new(),
            diagnostics: Diagnostics::default(),
        }
    }

    /// Final fidelity `F = F₂` at the end of the window.
    pub fn final_fidelity(&self) -> f64 {
        self.f2.last().copied().unwrap_or(f64::NAN)
    }

    pub fn final_f1(&self) -> f64 {
        self.f1.last().copied().unwrap_or(f64::NAN)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub(crate) fn push_column_value(&mut self, name: &str, value: f64) {
        match self.columns.iter_mut().find(|c| c.name == name) {
            Some(c) => c.values.push(value),
            None => self.columns.push(TraceColumn {
                name: name.to_string(),
                values: vec![value],
            }),
        }
    }

    /// Largest absolute difference between the fidelity traces of two runs
    /// sampled on the same grid.
    pub fn max_trace_difference(&self, other: &RunResult) -> f64 {
        assert_eq!(self.len(), other.len(), "runs sampled on different grids");
        self.f1
            .iter()
            .zip(&other.f1)
            .chain(self.f2.iter().zip(&other.f2))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Default for RunResult {
    fn default() -> Self {
        Self::new()
    }
}
