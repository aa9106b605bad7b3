use std::path::Path;

use serde::Serialize;

use super::{load_pretrained_text_vectors, sgns_train_report, EmbeddingSpace, Init, InitStrategy, TrainConfig, VectorTable};
use crate::corpus::PeriodSlice;
use crate::{Error, Result};

/// Epochs for the whole-corpus base model of the internal strategy,
/// independent of the per-period setting.
pub const INTERNAL_BASE_EPOCHS: usize = 50;

/// One training stage of a strategy run, in execution order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    /// Period name, or `"base"` for the internal base model.
    pub stage: String,
    /// What the stage was initialized from: a period name, `"base"`,
    /// `"external"`, or `None` for random.
    pub init_from: Option<String>,
    pub epochs: usize,
    pub tokens: usize,
    pub vocab_size: usize,
    pub copied_words: usize,
    pub final_loss: Option<f64>,
}

/// Spaces for every period, in chronological order.
#[derive(Clone, Debug)]
pub struct StrategyRun {
    pub strategy: InitStrategy,
    pub spaces: Vec<(String, EmbeddingSpace)>,
    pub stages: Vec<StageRecord>,
}

impl StrategyRun {
    pub fn space(&self, period: &str) -> Option<&EmbeddingSpace> {
        self.spaces.iter().find(|(p, _)| p == period).map(|(_, s)| s)
    }
}

fn check_slices(slices: &[PeriodSlice]) -> Result<()> {
    if slices.len() < 2 {
        return Err(Error::Precondition(format!(
            "alignment needs at least 2 period slices, got {}",
            slices.len()
        )));
    }
    for pair in slices.windows(2) {
        if pair[1].period.start_year <= pair[0].period.end_year {
            return Err(Error::Precondition(format!(
                "slices {} and {} are not in chronological order",
                pair[0].name(),
                pair[1].name()
            )));
        }
    }
    Ok(())
}

fn stage(
    slice: &PeriodSlice,
    config: &TrainConfig,
    init: Option<(Init<'_>, &str)>,
    stages: &mut Vec<StageRecord>,
    name: &str,
) -> Result<EmbeddingSpace> {
    let (space, report) = sgns_train_report(slice, config, init.map(|(i, _)| i))?;
    log::info!(
        "trained {name}: {} tokens, {} words, {} epochs",
        report.tokens,
        report.vocab_size,
        config.epochs
    );
    stages.push(StageRecord {
        stage: name.to_string(),
        init_from: init.map(|(_, from)| from.to_string()),
        epochs: config.epochs,
        tokens: report.tokens,
        vocab_size: report.vocab_size,
        copied_words: report.copied_words,
        final_loss: report.epoch_losses.last().copied(),
    });
    Ok(space)
}

/// Trains periods in order, each initialized from its predecessor; the first
/// starts random.
pub fn train_incremental(slices: &[PeriodSlice], config: &TrainConfig) -> Result<StrategyRun> {
    check_slices(slices)?;
    let mut stages = Vec::new();
    let mut spaces: Vec<(String, EmbeddingSpace)> = Vec::with_capacity(slices.len());
    for slice in slices {
        let init = spaces.last().map(|(name, space)| (Init::Space(space), name.as_str()));
        let space = stage(slice, config, init, &mut stages, slice.name())?;
        spaces.push((slice.name().to_string(), space));
    }
    Ok(StrategyRun {
        strategy: InitStrategy::Incremental,
        spaces,
        stages,
    })
}

/// Concatenates all slices into one.
fn concatenate(slices: &[PeriodSlice]) -> PeriodSlice {
    let first = &slices[0].period;
    let last = &slices[slices.len() - 1].period;
    PeriodSlice::new(
        crate::corpus::PeriodSpec::new("base", first.start_year, last.end_year),
        slices.iter().flat_map(|s| s.sentences.iter().cloned()).collect(),
        slices.iter().map(|s| s.charter_count).sum(),
    )
}

/// Trains a base model on all slices for [`INTERNAL_BASE_EPOCHS`], then
/// continues incrementally from the base through every period.
///
/// `config.epochs` applies to the per-period stages and may be zero, in which
/// case every period keeps the base vectors.
pub fn train_internal(slices: &[PeriodSlice], config: &TrainConfig) -> Result<StrategyRun> {
    check_slices(slices)?;
    let mut stages = Vec::new();
    let base_config = config.clone().with_epochs(INTERNAL_BASE_EPOCHS);
    let base = stage(&concatenate(slices), &base_config, None, &mut stages, "base")?;

    let mut spaces: Vec<(String, EmbeddingSpace)> = Vec::with_capacity(slices.len());
    for slice in slices {
        let init = match spaces.last() {
            Some((name, space)) => (Init::Space(space), name.as_str()),
            None => (Init::Space(&base), "base"),
        };
        let space = stage(slice, config, Some(init), &mut stages, slice.name())?;
        spaces.push((slice.name().to_string(), space));
    }
    Ok(StrategyRun {
        strategy: InitStrategy::Internal,
        spaces,
        stages,
    })
}

/// Seeds the latest period with external word vectors, then trains backwards
/// in time, each earlier period initialized from its successor.
pub fn train_backward_external(
    slices: &[PeriodSlice],
    pretrained: &VectorTable,
    config: &TrainConfig,
) -> Result<StrategyRun> {
    check_slices(slices)?;
    if pretrained.dim() != config.dim {
        return Err(Error::DimMismatch {
            expected: config.dim,
            found: pretrained.dim(),
        });
    }
    let mut stages = Vec::new();
    let mut reversed: Vec<(String, EmbeddingSpace)> = Vec::with_capacity(slices.len());
    for slice in slices.iter().rev() {
        let init = match reversed.last() {
            Some((name, space)) => (Init::Space(space), name.as_str()),
            None => (Init::Vectors(pretrained), "external"),
        };
        let space = stage(slice, config, Some(init), &mut stages, slice.name())?;
        reversed.push((slice.name().to_string(), space));
    }
    reversed.reverse();
    Ok(StrategyRun {
        strategy: InitStrategy::BackwardExternal,
        spaces: reversed,
        stages,
    })
}

pub fn train_backward_external_from_path(
    slices: &[PeriodSlice],
    pretrained_path: impl AsRef<Path>,
    config: &TrainConfig,
) -> Result<StrategyRun> {
    let table = load_pretrained_text_vectors(pretrained_path)?;
    train_backward_external(slices, &table, config)
}

/// Dispatches on `strategy`. `pretrained` is required for the backward
/// external strategy and ignored otherwise.
pub fn train_strategy(
    strategy: InitStrategy,
    slices: &[PeriodSlice],
    config: &TrainConfig,
    pretrained: Option<&VectorTable>,
) -> Result<StrategyRun> {
    match strategy {
        InitStrategy::Incremental => train_incremental(slices, config),
        InitStrategy::Internal => train_internal(slices, config),
        InitStrategy::BackwardExternal => {
            let table = pretrained.ok_or_else(|| {
                Error::Config("the external strategy needs pretrained vectors".into())
            })?;
            train_backward_external(slices, table, config)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PeriodSpec;
    use crate::semantics::cosine;

    fn periods() -> Vec<PeriodSlice> {
        let text = |extra: &str| -> Vec<Vec<String>> {
            (0..12)
                .map(|i| {
                    format!("ego rex dedi terram {extra} {}", if i % 2 == 0 { "sancto" } else { "petro" })
                        .split_whitespace()
                        .map(str::to_string)
                        .collect()
                })
                .collect()
        };
        PeriodSpec::deeds_defaults()
            .into_iter()
            .zip(["anglorum", "normannorum", "comiti"])
            .map(|(spec, extra)| PeriodSlice::new(spec, text(extra), 3))
            .collect()
    }

    fn config() -> TrainConfig {
        TrainConfig {
            dim: 10,
            epochs: 2,
            bucket_count: 64,
            seed: 11,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn incremental_chain() {
        let run = train_incremental(&periods(), &config()).unwrap();
        let names: Vec<_> = run.spaces.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["ANG", "NOR", "PLA"]);
        assert_eq!(run.stages[0].init_from, None);
        assert_eq!(run.stages[1].init_from.as_deref(), Some("ANG"));
        assert_eq!(run.stages[2].init_from.as_deref(), Some("NOR"));
    }

    #[test]
    fn single_slice_rejected() {
        let p = periods();
        assert!(matches!(train_incremental(&p[..1], &config()), Err(Error::Precondition(_))));
        let mut backwards = p.clone();
        backwards.reverse();
        assert!(train_incremental(&backwards, &config()).is_err());
    }

    #[test]
    fn internal_base_is_fifty_epochs_over_everything() {
        let p = periods();
        let run = train_internal(&p, &config()).unwrap();
        let base = &run.stages[0];
        assert_eq!(base.stage, "base");
        assert_eq!(base.epochs, INTERNAL_BASE_EPOCHS);
        let total: usize = p.iter().map(|s| s.token_count).sum();
        assert_eq!(concatenate(&p).token_count, total);
        assert_eq!(base.tokens, total);
        assert_eq!(run.stages[1].init_from.as_deref(), Some("base"));
        assert_eq!(run.stages[1].epochs, 2);
    }

    #[test]
    fn internal_without_updates_shares_base() {
        let run = train_internal(&periods(), &config().with_epochs(0)).unwrap();
        let (ang, nor) = (run.space("ANG").unwrap(), run.space("NOR").unwrap());
        for w in ["ego", "rex", "terram"] {
            let c = cosine(&ang.word_vector(w).unwrap(), &nor.word_vector(w).unwrap()).unwrap();
            assert!(c >= 1.0 - 1e-6, "{w}: {c}");
        }
    }

    #[test]
    fn backward_order_and_dims() {
        let mut table = VectorTable::new(10);
        table.insert("rex", vec![0.5; 10]).unwrap();
        table.insert("absent", vec![1.0; 10]).unwrap();
        let run = train_backward_external(&periods(), &table, &config()).unwrap();
        let order: Vec<_> = run.stages.iter().map(|s| s.stage.as_str()).collect();
        assert_eq!(order, ["PLA", "NOR", "ANG"]);
        assert_eq!(run.stages[0].init_from.as_deref(), Some("external"));
        assert_eq!(run.stages[0].copied_words, 1);
        let names: Vec<_> = run.spaces.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["ANG", "NOR", "PLA"]);

        let wide = VectorTable::new(300);
        match train_backward_external(&periods(), &wide, &config().with_dim(10)) {
            Err(Error::DimMismatch { expected, found }) => assert_eq!((expected, found), (10, 300)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn external_needs_vectors() {
        assert!(matches!(
            train_strategy(InitStrategy::BackwardExternal, &periods(), &config(), None),
            Err(Error::Config(_))
        ));
    }
}
