use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::ContextualSentenceRecord;
use crate::corpus::normalize_token;
use crate::embed::{write_text_vectors, VectorTable};
use crate::{Error, Matrix, Result};

/// Element-wise mean of the record's layers: a `piece_count x dim` matrix.
pub fn sentence_embedding(record: &ContextualSentenceRecord) -> Matrix<f64> {
    let (pieces, dim) = (record.piece_count(), record.dim());
    let mut acc = vec![0f64; pieces * dim];
    for l in 0..record.layer_count() {
        for (a, &v) in acc.iter_mut().zip(record.layer(l)) {
            *a += v as f64;
        }
    }
    let k = record.layer_count() as f64;
    acc.iter_mut().for_each(|a| *a /= k);
    Matrix::from_vec(pieces, dim, acc)
}

/// Mean of rows `start..end`. The span must be non-empty and in range.
pub fn word_occurrence_embedding(sentence: &Matrix<f64>, start: usize, end: usize) -> Vec<f64> {
    assert!(start < end && end <= sentence.rows(), "invalid span [{start}, {end})");
    let mut acc = vec![0f64; sentence.cols()];
    for p in start..end {
        for (a, v) in acc.iter_mut().zip(sentence.row(p)) {
            *a += v;
        }
    }
    let n = (end - start) as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

/// Running mean of one word's occurrence vectors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordMean {
    pub vector: Vec<f64>,
    pub count: u64,
}

impl WordMean {
    fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for (m, v) in self.vector.iter_mut().zip(x) {
            *m += (v - *m) / n;
        }
    }

    fn merge(&mut self, other: &WordMean) {
        let total = self.count + other.count;
        let w = other.count as f64 / total as f64;
        for (m, v) in self.vector.iter_mut().zip(&other.vector) {
            *m += (v - *m) * w;
        }
        self.count = total;
    }
}

/// One averaged vector per distinct word of a period.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregatedEmbeddings {
    pub period: String,
    pub dim: usize,
    pub words: BTreeMap<String, WordMean>,
}

impl AggregatedEmbeddings {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&WordMean> {
        self.words.get(word)
    }

    /// Total occurrences over all words.
    pub fn occurrences(&self) -> u64 {
        self.words.values().map(|w| w.count).sum()
    }

    pub fn to_vector_table(&self) -> VectorTable {
        let mut table = VectorTable::new(self.dim);
        for (word, mean) in &self.words {
            table
                .insert(word.clone(), mean.vector.iter().map(|&v| v as f32).collect())
                .expect("dimension checked on insert");
        }
        table
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AggregationStats {
    pub records_seen: u64,
    pub records_used: u64,
    pub skipped_other_period: u64,
    pub occurrences: u64,
    /// Spanned words whose surface normalized to nothing.
    pub empty_surfaces: u64,
    /// Words the exporter reported as cut off by the length limit.
    pub truncated_words: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregationOutcome {
    pub embeddings: AggregatedEmbeddings,
    pub stats: AggregationStats,
}

/// Incremental aggregation for one period. Partial aggregators over disjoint
/// record sets can be combined with [`Aggregator::merge`].
#[derive(Clone, Debug)]
pub struct Aggregator {
    period: String,
    dim: Option<usize>,
    words: BTreeMap<String, WordMean>,
    stats: AggregationStats,
}

impl Aggregator {
    pub fn new(period: impl Into<String>) -> Self {
        Aggregator {
            period: period.into(),
            dim: None,
            words: BTreeMap::new(),
            stats: AggregationStats::default(),
        }
    }

    pub fn push(&mut self, record: &ContextualSentenceRecord) -> Result<()> {
        self.stats.records_seen += 1;
        if record.period() != self.period {
            self.stats.skipped_other_period += 1;
            return Ok(());
        }
        match self.dim {
            None => self.dim = Some(record.dim()),
            Some(d) if d != record.dim() => {
                return Err(Error::Record {
                    sentence_id: record.sentence_id().to_string(),
                    message: format!("dim {} differs from earlier records ({d})", record.dim()),
                })
            }
            Some(_) => {}
        }
        self.stats.records_used += 1;
        self.stats.truncated_words += record.truncated_words() as u64;

        let sentence = sentence_embedding(record);
        for span in record.words() {
            let Some(word) = normalize_token(&span.surface) else {
                self.stats.empty_surfaces += 1;
                continue;
            };
            let occurrence = word_occurrence_embedding(&sentence, span.start, span.end);
            self.words
                .entry(word)
                .or_insert_with(|| WordMean {
                    vector: vec![0.0; occurrence.len()],
                    count: 0,
                })
                .push(&occurrence);
            self.stats.occurrences += 1;
        }
        Ok(())
    }

    /// Folds in another aggregator's state, weighting means by counts.
    pub fn merge(&mut self, other: &Aggregator) -> Result<()> {
        if other.period != self.period {
            return Err(Error::Validation(format!(
                "cannot merge period {} into {}",
                other.period, self.period
            )));
        }
        match (self.dim, other.dim) {
            (Some(a), Some(b)) if a != b => return Err(Error::DimMismatch { expected: a, found: b }),
            (None, d) => self.dim = d,
            _ => {}
        }
        for (word, mean) in &other.words {
            match self.words.get_mut(word) {
                Some(existing) => existing.merge(mean),
                None => {
                    self.words.insert(word.clone(), mean.clone());
                }
            }
        }
        let s = &other.stats;
        self.stats.records_seen += s.records_seen;
        self.stats.records_used += s.records_used;
        self.stats.skipped_other_period += s.skipped_other_period;
        self.stats.occurrences += s.occurrences;
        self.stats.empty_surfaces += s.empty_surfaces;
        self.stats.truncated_words += s.truncated_words;
        Ok(())
    }

    pub fn finish(self) -> Result<AggregationOutcome> {
        let dim = match self.dim {
            Some(d) if self.stats.records_used > 0 => d,
            _ => return Err(Error::EmptyPeriodStream(self.period)),
        };
        Ok(AggregationOutcome {
            embeddings: AggregatedEmbeddings {
                period: self.period,
                dim,
                words: self.words,
            },
            stats: self.stats,
        })
    }
}

/// Averages every word's occurrence vectors over the records of `period`.
/// Records of other periods are counted and skipped.
pub fn aggregate<I>(records: I, period: &str) -> Result<AggregationOutcome>
where
    I: IntoIterator<Item = Result<ContextualSentenceRecord>>,
{
    let mut agg = Aggregator::new(period);
    for record in records {
        agg.push(&record?)?;
    }
    agg.finish()
}

/// Writes the aggregated vectors in the word2vec text format.
pub fn export_as_wordvectors(agg: &AggregatedEmbeddings, path: impl AsRef<Path>) -> Result<()> {
    if agg.is_empty() {
        return Err(Error::Precondition(format!("period {} has no aggregated words", agg.period)));
    }
    write_text_vectors(&agg.to_vector_table(), path)
}
