use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::PeriodSlice;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodCounts {
    pub period: String,
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl PeriodCounts {
    /// Occurrences per 100,000 tokens.
    pub fn rate_per_100k(&self, word: &str) -> f64 {
        let count = self.counts.get(word).copied().unwrap_or(0);
        if self.total == 0 {
            return 0.0;
        }
        count as f64 * 100_000.0 / self.total as f64
    }
}

/// Exact token counts per period, in slice order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyTable {
    pub periods: Vec<PeriodCounts>,
}

impl FrequencyTable {
    pub fn period(&self, name: &str) -> Option<&PeriodCounts> {
        self.periods.iter().find(|p| p.period == name)
    }
}

pub fn compute_frequencies(slices: &[PeriodSlice]) -> Result<FrequencyTable> {
    if slices.is_empty() {
        return Err(Error::Precondition("no period slices to count".into()));
    }
    let periods = slices
        .iter()
        .map(|slice| {
            let mut counts = BTreeMap::new();
            for token in slice.tokens() {
                *counts.entry(token.to_string()).or_insert(0u64) += 1;
            }
            PeriodCounts {
                period: slice.period.name.clone(),
                total: counts.values().sum(),
                counts,
            }
        })
        .collect();
    Ok(FrequencyTable { periods })
}

/// Words whose relative frequency strictly exceeds `threshold_per_100k` in
/// every period.
pub fn select_targets(freqs: &FrequencyTable, threshold_per_100k: f64) -> Result<BTreeSet<String>> {
    if freqs.periods.is_empty() {
        return Err(Error::Precondition("frequency table has no periods".into()));
    }
    if let Some(p) = freqs.periods.iter().find(|p| p.total == 0) {
        return Err(Error::Precondition(format!("period {} has zero tokens", p.period)));
    }
    // count / total * 1e5 > t  <=>  count * 1e5 > t * total, which stays exact
    // for integer-valued products and so keeps the boundary case strict.
    let exceeds = |p: &PeriodCounts, word: &str| {
        let count = p.counts.get(word).copied().unwrap_or(0);
        count as f64 * 100_000.0 > threshold_per_100k * p.total as f64
    };
    let (first, rest) = freqs.periods.split_first().expect("non-empty");
    Ok(first
        .counts
        .keys()
        .filter(|w| exceeds(first, w) && rest.iter().all(|p| exceeds(p, w)))
        .cloned()
        .collect())
}
