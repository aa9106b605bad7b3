//! Lexical semantic change detection over dated historical corpora.
//!
//! The crate covers the whole analysis pipeline:
//!
//! * [`corpus`]: charter ingestion, tokenization, period slicing, frequency
//!   statistics and target selection.
//! * [`embed`]: skip-gram with negative sampling over hashed character
//!   n-grams, trained per period and aligned through weight initialization
//!   (incremental, internal, backward external).
//! * [`context`]: aggregation of exported contextual hidden states into one
//!   vector per word per period.
//! * [`semantics`]: cross-period cosine similarity and evaluation against
//!   binary change labels (mean difference, Welch t-test, point-biserial
//!   correlation, distribution summaries).
//! * [`report`]: the JSON report bundle and its self-contained HTML rendering.
//! * [`cli`]: the commands behind the `clex` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod cli;
pub mod context;
pub mod corpus;
pub mod embed;
mod error;
pub mod matrix;
pub mod report;
pub mod semantics;
pub mod synthetic;

pub use error::{Error, Result};
pub use matrix::Matrix;

pub use context::{aggregate, AggregatedEmbeddings, ContextualSentenceRecord};
pub use corpus::{Charter, ChangeLabel, ChangeLabelSet, FrequencyTable, PeriodSlice, PeriodSpec};
pub use embed::{EmbeddingSpace, InitStrategy, TrainConfig, VectorTable, Vocab};
pub use semantics::{compute_metrics, cosine, MetricsResult, SimilarityRow};
