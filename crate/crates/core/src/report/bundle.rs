use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed::SweepReport;
use crate::semantics::{ComparisonReport, Coverage, DistributionSummary, MetricsResult};
use crate::{Error, Result};

pub const SCHEMA: &str = "clex-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub metrics: MetricsResult,
    pub distribution: DistributionSummary,
}

/// Everything evaluated for one embedding model (a static strategy or a
/// contextual checkpoint).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub name: String,
    pub transitions: Vec<TransitionReport>,
    /// First transition against the second, when at least two were evaluated.
    #[serde(default)]
    pub comparison: Option<ComparisonReport>,
    #[serde(default)]
    pub coverage: Vec<Coverage>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema: String,
    #[serde(default)]
    pub models: Vec<ModelReport>,
    #[serde(default)]
    pub sweeps: Vec<SweepReport>,
}

impl Default for ReportBundle {
    fn default() -> Self {
        ReportBundle {
            schema: SCHEMA.to_string(),
            models: Vec::new(),
            sweeps: Vec::new(),
        }
    }
}

impl ReportBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty() && self.sweeps.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Validation(format!(
                "unsupported report schema {:?}, expected {SCHEMA:?}",
                self.schema
            )));
        }
        if self.is_empty() {
            return Err(Error::Validation("report bundle has no models and no sweeps".into()));
        }
        for m in &self.models {
            if m.transitions.is_empty() {
                return Err(Error::Validation(format!("model {} has no transitions", m.name)));
            }
        }
        for s in &self.sweeps {
            if s.cells.len() != s.dims.len() * s.epochs.len() {
                return Err(Error::Validation(format!(
                    "sweep has {} cells for a {}x{} grid",
                    s.cells.len(),
                    s.dims.len(),
                    s.epochs.len()
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bundle: ReportBundle = serde_json::from_str(text)?;
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }
}
