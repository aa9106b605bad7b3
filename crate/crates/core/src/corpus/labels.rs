use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum ChangeLabel {
    Unchanged = 0,
    Changed = 1,
}

impl ChangeLabel {
    pub fn as_f64(self) -> f64 {
        self as u8 as f64
    }

    pub fn is_changed(self) -> bool {
        self == ChangeLabel::Changed
    }
}

impl From<ChangeLabel> for u8 {
    fn from(l: ChangeLabel) -> u8 {
        l as u8
    }
}

impl TryFrom<u8> for ChangeLabel {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(ChangeLabel::Unchanged),
            1 => Ok(ChangeLabel::Changed),
            other => Err(format!("label must be 0 or 1, got {other}")),
        }
    }
}

/// Gold binary change labels for target words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeLabelSet {
    pub labels: BTreeMap<String, ChangeLabel>,
}

impl ChangeLabelSet {
    pub fn get(&self, word: &str) -> Option<ChangeLabel> {
        self.labels.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn count(&self, label: ChangeLabel) -> usize {
        self.labels.values().filter(|&&l| l == label).count()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.labels.keys().map(String::as_str)
    }
}

#[derive(Clone, Debug)]
pub struct LabelLoad {
    pub labels: ChangeLabelSet,
    /// One message per labeled word that is not a target.
    pub warnings: Vec<String>,
}

pub fn load_labels(path: impl AsRef<Path>, targets: &BTreeSet<String>) -> Result<LabelLoad> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_labels(file, targets, &path.display().to_string())
}

/// Parses a two-column `word,label` CSV. A leading `word,label` header row is
/// optional.
pub fn parse_labels<R: Read>(reader: R, targets: &BTreeSet<String>, source_name: &str) -> Result<LabelLoad> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut labels = BTreeMap::new();
    let mut warnings = Vec::new();

    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(idx + 1);
        if idx == 0 && record.get(0).map(str::trim) == Some("word") && record.get(1).map(str::trim) == Some("label") {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::parse(source_name, line, format!("expected 2 columns, found {}", record.len())));
        }
        let word = record[0].trim().to_lowercase();
        let label = match record[1].trim() {
            "0" => ChangeLabel::Unchanged,
            "1" => ChangeLabel::Changed,
            other => return Err(Error::parse(source_name, line, format!("label must be 0 or 1, got {other:?}"))),
        };
        if word.is_empty() {
            return Err(Error::parse(source_name, line, "empty word"));
        }
        if targets.contains(&word) {
            labels.insert(word, label);
        } else {
            warnings.push(format!("{source_name}:{line}: {word:?} is not a target word; ignored"));
        }
    }
    Ok(LabelLoad {
        labels: ChangeLabelSet { labels },
        warnings,
    })
}
