//! Skip-gram with negative sampling over hashed character n-grams, trained per
//! period and aligned across periods through weight initialization.

mod config;
mod file;
mod sgns;
mod space;
mod strategy;
mod subword;
mod sweep;
mod text;
mod vocab;

pub use config::{InitStrategy, TrainConfig};
pub use file::{load_space, save_space, SPACE_MAGIC};
pub use sgns::{pair_gradient, pair_loss, sgns_train, sgns_train_report, Init, PairGradient, TrainReport};
pub use space::EmbeddingSpace;
pub use strategy::{
    train_backward_external, train_backward_external_from_path, train_incremental, train_internal,
    train_strategy, StageRecord, StrategyRun, INTERNAL_BASE_EPOCHS,
};
pub use subword::{fnv1a_32, fnv1a_64, SubwordIndexer};
pub use sweep::{sweep, SweepCell, SweepReport};
pub use text::{load_pretrained_text_vectors, parse_text_vectors, write_text_vectors, VectorTable, WordVectors};
pub use vocab::{build_vocab, Vocab};
