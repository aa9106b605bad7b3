use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{ChangeLabel, ChangeLabelSet};
use crate::embed::WordVectors;
use crate::{Error, Result};

/// Cosine similarity `u·v / (|u| |v|)`, clamped to `[-1, 1]`.
///
/// Zero vectors are an error rather than a silent zero.
pub fn cosine<T: Copy + Into<f64>>(u: &[T], v: &[T]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (a.into(), b.into());
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Precondition("cosine of a zero-norm vector".into()));
    }
    let c = dot / (nu.sqrt() * nv.sqrt());
    if !c.is_finite() {
        return Err(Error::Precondition("cosine of a non-finite vector".into()));
    }
    Ok(c.clamp(-1.0, 1.0))
}

/// A named pair of consecutive periods, e.g. `AN` for `ANG -> NOR`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub name: String,
    pub from: String,
    pub to: String,
}

impl Transition {
    pub fn new(name: impl Into<String>, from: impl Into<String>, to: impl Into<String>) -> Self {
        Transition {
            name: name.into(),
            from: from.into(),
            to: to.into(),
        }
    }

    /// One transition per consecutive pair, named by the first letters of
    /// both periods (`ANG`, `NOR` -> `AN`).
    pub fn consecutive<S: AsRef<str>>(periods: &[S]) -> Vec<Transition> {
        periods
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0].as_ref(), w[1].as_ref());
                let initial = |s: &str| s.chars().next().map(String::from).unwrap_or_default();
                Transition::new(format!("{}{}", initial(a), initial(b)), a, b)
            })
            .collect()
    }
}

/// One word's cross-period cosines, keyed by transition name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRow {
    pub word: String,
    pub cos: BTreeMap<String, f64>,
    pub label: Option<ChangeLabel>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingSide {
    From,
    To,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingWord {
    pub word: String,
    pub missing: MissingSide,
}

/// Targets that could not be compared for one transition.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub transition: String,
    pub compared: usize,
    pub missing: Vec<MissingWord>,
}

/// Cosine between both periods' vectors for every target present in both.
pub fn pair_similarities<A, B>(
    space_a: &A,
    space_b: &B,
    targets: &BTreeSet<String>,
    transition: &str,
) -> Result<(Vec<SimilarityRow>, Coverage)>
where
    A: WordVectors + ?Sized,
    B: WordVectors + ?Sized,
{
    let mut rows = Vec::new();
    let mut coverage = Coverage {
        transition: transition.to_string(),
        ..Default::default()
    };
    for word in targets {
        match (space_a.vector(word), space_b.vector(word)) {
            (Some(a), Some(b)) => {
                let c = cosine(&a, &b).map_err(|e| Error::Precondition(format!("{word:?} in {transition}: {e}")))?;
                rows.push(SimilarityRow {
                    word: word.clone(),
                    cos: BTreeMap::from([(transition.to_string(), c)]),
                    label: None,
                });
            }
            (a, b) => coverage.missing.push(MissingWord {
                word: word.clone(),
                missing: match (a.is_some(), b.is_some()) {
                    (true, false) => MissingSide::To,
                    (false, true) => MissingSide::From,
                    _ => MissingSide::Both,
                },
            }),
        }
    }
    coverage.compared = rows.len();
    Ok((rows, coverage))
}

/// Joins rows from several transitions by word, sorted by word.
pub fn merge_rows(row_sets: impl IntoIterator<Item = Vec<SimilarityRow>>) -> Vec<SimilarityRow> {
    let mut merged: BTreeMap<String, SimilarityRow> = BTreeMap::new();
    for rows in row_sets {
        for row in rows {
            let entry = merged.entry(row.word.clone()).or_insert_with(|| SimilarityRow {
                word: row.word.clone(),
                cos: BTreeMap::new(),
                label: row.label,
            });
            entry.cos.extend(row.cos);
            entry.label = entry.label.or(row.label);
        }
    }
    merged.into_values().collect()
}

pub fn attach_labels(rows: &mut [SimilarityRow], labels: &ChangeLabelSet) {
    for row in rows {
        row.label = labels.get(&row.word);
    }
}
