//! Cross-period similarity and evaluation against gold change labels.

mod compare;
mod distribution;
mod metrics;
mod similarity;
pub mod stats;

pub use compare::{compare_transitions, ComparisonReport, Expectation};
pub use distribution::{distribution_summary, DistributionSummary, GroupSummary, BIN_COUNT, BIN_WIDTH};
pub use metrics::{compute_metrics, MetricsResult, SIGNIFICANCE_LEVEL};
pub use similarity::{
    attach_labels, cosine, merge_rows, pair_similarities, Coverage, MissingSide, MissingWord, SimilarityRow,
    Transition,
};
