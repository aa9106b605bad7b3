//! Per-period word vectors from exported contextual hidden states.
//!
//! Each sentence arrives as a [`ContextualSentenceRecord`] holding the last
//! `K` hidden layers and the piece span of every word. The sentence matrix is
//! the mean of those layers, a word occurrence is the mean of its pieces'
//! rows, and a word's period vector is the mean over all its occurrences.

mod aggregate;
mod record;

pub use aggregate::{
    aggregate, export_as_wordvectors, sentence_embedding, word_occurrence_embedding, AggregatedEmbeddings,
    AggregationOutcome, AggregationStats, Aggregator, WordMean,
};
pub use record::{read_records, write_records, ContextualSentenceRecord, RecordReader, WordSpan};
