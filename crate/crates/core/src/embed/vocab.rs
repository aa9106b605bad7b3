use std::collections::HashMap;

use crate::corpus::PeriodSlice;
use crate::{Error, Result};

/// Words kept for training, ordered by descending count (ties by word).
#[derive(Clone, Debug, PartialEq)]
pub struct Vocab {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    /// count^0.75, normalized.
    sampling: Vec<f64>,
}

impl Vocab {
    /// Builds a vocabulary from `(word, count)` pairs, dropping words below
    /// `min_count`. Duplicate words are summed.
    pub fn from_counts<I, S>(counts: I, min_count: u64) -> Result<Vocab>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut merged: HashMap<String, u64> = HashMap::new();
        for (w, c) in counts {
            *merged.entry(w.into()).or_insert(0) += c;
        }
        let mut entries: Vec<(String, u64)> = merged.into_iter().filter(|(_, c)| *c >= min_count.max(1)).collect();
        if entries.is_empty() {
            return Err(Error::Precondition(format!(
                "empty vocabulary: no word occurs at least {min_count} times"
            )));
        }
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (words, counts): (Vec<String>, Vec<u64>) = entries.into_iter().unzip();
        Ok(Self::from_parts(words, counts))
    }

    /// Rebuilds a vocabulary with a fixed word order, e.g. from a space file.
    pub(crate) fn from_parts(words: Vec<String>, counts: Vec<u64>) -> Vocab {
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        let total: f64 = weights.iter().sum();
        let sampling = weights.iter().map(|w| w / total).collect();
        Vocab {
            words,
            counts,
            index,
            sampling,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, idx: usize) -> &str {
        &self.words[idx]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, idx: usize) -> u64 {
        self.counts[idx]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Negative-sampling probabilities, indexed like the vocabulary.
    pub fn sampling_distribution(&self) -> &[f64] {
        &self.sampling
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn build_vocab(slice: &PeriodSlice, min_count: u64) -> Result<Vocab> {
    if slice.is_empty() {
        return Err(Error::Precondition(format!("period {} has no tokens", slice.name())));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for t in slice.tokens() {
        *counts.entry(t).or_insert(0) += 1;
    }
    Vocab::from_counts(counts, min_count)
}
