use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hyperparameters for one skip-gram training run.
///
/// Everything except `dim` and `epochs` defaults to the usual fastText
/// skip-gram settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    pub epochs: usize,
    /// Maximum context window; the effective window is drawn from `[1, window]`
    /// for every target position.
    pub window: usize,
    pub negatives: usize,
    pub min_count: u64,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub bucket_count: usize,
    pub initial_lr: f32,
    pub seed: u64,
    /// Worker threads. `1` is the deterministic mode.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            epochs: 10,
            window: 5,
            negatives: 5,
            min_count: 5,
            ngram_min: 3,
            ngram_max: 6,
            bucket_count: 2_000_000,
            initial_lr: 0.025,
            seed: 1,
            threads: 1,
        }
    }
}

impl TrainConfig {
    /// Checks every field except `epochs`, which is allowed to be zero when
    /// training continues from an existing space.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Validation(format!("train config: {msg}")));
        if self.dim == 0 {
            return fail("dim must be positive");
        }
        if self.window == 0 {
            return fail("window must be at least 1");
        }
        if self.negatives == 0 {
            return fail("negatives must be at least 1");
        }
        if self.ngram_min == 0 || self.ngram_min > self.ngram_max {
            return fail("need 1 <= ngram_min <= ngram_max");
        }
        if self.bucket_count == 0 {
            return fail("bucket_count must be at least 1");
        }
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return fail("initial_lr must be positive");
        }
        if self.threads == 0 {
            return fail("threads must be at least 1");
        }
        Ok(())
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }
}

/// How consecutive period spaces are tied together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitStrategy {
    /// Each period starts from the previous period's space.
    Incremental,
    /// A base model over the whole corpus seeds the first period, then
    /// incremental.
    Internal,
    /// External pretrained vectors seed the latest period, then training
    /// proceeds backwards in time.
    #[serde(rename = "external", alias = "backward-external")]
    BackwardExternal,
}

impl InitStrategy {
    pub const ALL: [InitStrategy; 3] = [
        InitStrategy::Incremental,
        InitStrategy::Internal,
        InitStrategy::BackwardExternal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InitStrategy::Incremental => "incremental",
            InitStrategy::Internal => "internal",
            InitStrategy::BackwardExternal => "external",
        }
    }
}

impl fmt::Display for InitStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "incremental" => Ok(InitStrategy::Incremental),
            "internal" => Ok(InitStrategy::Internal),
            "external" | "backward-external" | "backward_external" => Ok(InitStrategy::BackwardExternal),
            other => Err(Error::Usage(format!(
                "unknown strategy {other:?} (expected incremental, internal or external)"
            ))),
        }
    }
}
