use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{load_period_specs, validate_specs, PeriodSpec};
use crate::embed::{InitStrategy, TrainConfig};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub strategy: InitStrategy,
    pub dims: Vec<usize>,
    pub epochs: Vec<usize>,
    /// Transition the grid is scored on; the first one when unset.
    pub transition: Option<String>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            strategy: InitStrategy::Incremental,
            dims: vec![100, 300],
            epochs: vec![10, 30, 50],
            transition: None,
        }
    }
}

/// Everything a pipeline run needs, read from one JSON document.
///
/// Any field can be overridden on the command line with a flag of the same
/// dotted name, e.g. `--train.dim 300` or `--records.bert.ANG=ang.ndjson`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Charter file, `.csv` or `.jsonl`.
    pub charters: Option<PathBuf>,
    /// JSON array of period specs; the DEEDS periods when unset.
    pub periods: Option<PathBuf>,
    /// `word,label` CSV of gold change labels.
    pub labels: Option<PathBuf>,
    pub out: PathBuf,
    /// Minimum rate per 100k tokens, exceeded in every period, for a word to
    /// be a target.
    pub threshold_per_100k: f64,
    pub strategies: Vec<InitStrategy>,
    /// word2vec text vectors for the external strategy.
    pub pretrained: Option<PathBuf>,
    pub train: TrainConfig,
    /// Contextual record files: model name -> period name -> path.
    pub records: BTreeMap<String, BTreeMap<String, PathBuf>>,
    /// Transition names (e.g. `AN`) to evaluate; every consecutive pair when
    /// empty.
    pub transitions: Vec<String>,
    pub sweep: SweepSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            charters: None,
            periods: None,
            labels: None,
            out: PathBuf::from("out"),
            threshold_per_100k: 5.0,
            strategies: vec![InitStrategy::Incremental],
            pretrained: None,
            train: TrainConfig::default(),
            records: BTreeMap::new(),
            transitions: Vec::new(),
            sweep: SweepSettings::default(),
        }
    }
}

impl RunConfig {
    /// Reads the config file (or defaults) and applies dotted overrides in
    /// order.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => serde_json::to_value(RunConfig::default())?,
        };
        for (key, raw) in overrides {
            apply_override(&mut value, key, raw)?;
        }
        let config: RunConfig =
            serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        config.train.validate()?;
        Ok(config)
    }

    pub fn period_specs(&self) -> Result<Vec<PeriodSpec>> {
        let specs = match &self.periods {
            Some(p) => load_period_specs(p)?,
            None => PeriodSpec::deeds_defaults(),
        };
        validate_specs(&specs)?;
        Ok(specs)
    }

    pub fn require_file(&self, field: &str, path: Option<&PathBuf>) -> Result<PathBuf> {
        let path = path.ok_or_else(|| Error::Config(format!("`{field}` is not set")))?;
        if !path.is_file() {
            return Err(Error::Config(format!("`{field}`: {} does not exist", path.display())));
        }
        Ok(path.clone())
    }
}

/// True when `key` names a field of the config (its first segment is a
/// top-level field).
pub fn is_config_key(key: &str) -> bool {
    let top = key.split('.').next().unwrap_or_default();
    matches!(serde_json::to_value(RunConfig::default()), Ok(Value::Object(m)) if m.contains_key(top))
}

/// Sets the dotted `key` in `value`, creating intermediate objects. The raw
/// text is taken as JSON when it parses, otherwise as a string.
pub fn apply_override(value: &mut Value, key: &str, raw: &str) -> Result<()> {
    if !is_config_key(key) {
        return Err(Error::Usage(format!("unknown config field `{key}`")));
    }
    let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = value;
    let segments: Vec<&str> = key.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        if seg.is_empty() {
            return Err(Error::Usage(format!("malformed config key `{key}`")));
        }
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
        let Value::Object(map) = node else {
            return Err(Error::Usage(format!("`{key}`: `{}` is not an object", segments[..i].join("."))));
        };
        if i + 1 == segments.len() {
            map.insert(seg.to_string(), parsed);
            return Ok(());
        }
        node = map.entry(seg.to_string()).or_insert(Value::Null);
    }
    unreachable!("split yields at least one segment")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults() {
        let c = RunConfig::load(None, &[]).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.period_specs().unwrap(), PeriodSpec::deeds_defaults());
    }

    #[test]
    fn dotted_overrides() {
        let c = RunConfig::load(
            None,
            &ov(&[
                ("train.dim", "300"),
                ("strategies", r#"["internal","external"]"#),
                ("records.bert.ANG", "ang.ndjson"),
                ("labels", "labels.csv"),
                ("sweep.transition", "AN"),
            ]),
        )
        .unwrap();
        assert_eq!(c.train.dim, 300);
        assert_eq!(c.strategies, vec![InitStrategy::Internal, InitStrategy::BackwardExternal]);
        assert_eq!(c.records["bert"]["ANG"], PathBuf::from("ang.ndjson"));
        assert_eq!(c.labels, Some(PathBuf::from("labels.csv")));
        assert_eq!(c.sweep.transition.as_deref(), Some("AN"));
    }

    #[test]
    fn file_then_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        fs::write(&path, r#"{"train": {"dim": 50, "epochs": 3}, "threshold_per_100k": 7}"#).unwrap();
        let c = RunConfig::load(Some(&path), &ov(&[("train.epochs", "4")])).unwrap();
        assert_eq!((c.train.dim, c.train.epochs, c.threshold_per_100k), (50, 4, 7.0));
        assert_eq!(c.train.window, TrainConfig::default().window);
    }

    #[test]
    fn rejects_unknown() {
        assert!(matches!(RunConfig::load(None, &ov(&[("nope", "1")])), Err(Error::Usage(_))));
        assert!(matches!(RunConfig::load(None, &ov(&[("train.dimm", "1")])), Err(Error::Config(_))));
        assert!(RunConfig::load(None, &ov(&[("train.dim", "0")])).is_err());
        assert!(RunConfig::load(None, &ov(&[("strategies", r#"["bogus"]"#)])).is_err());
    }
}
