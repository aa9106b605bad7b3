//! Dated charters, period slicing and target word selection.

mod charter;
mod freq;
mod labels;
mod period;
mod tokenize;

pub use charter::{load_charters, parse_charters, Charter, CharterFormat};
pub use freq::{compute_frequencies, select_targets, FrequencyTable, PeriodCounts};
pub use labels::{load_labels, parse_labels, ChangeLabel, ChangeLabelSet, LabelLoad};
pub use period::{
    load_period_specs, read_slice, split_periods, validate_specs, write_slice, ExcludedCharter,
    PeriodSlice, PeriodSpec, PeriodSplit,
};
pub use tokenize::{normalize_and_tokenize, normalize_token, SENTENCE_DELIMITERS};
