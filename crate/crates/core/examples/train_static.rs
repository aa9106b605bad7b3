//! Trains aligned static embeddings with each initialization strategy and
//! shows how similar a word stays across periods.
//!
//! cargo run --release --example train_static

use clex::embed::{save_space, load_space, train_backward_external, train_incremental, train_internal, VectorTable};
use clex::semantics::cosine;
use clex::synthetic::{planted_corpus, PlantedConfig};
use clex::{ChangeLabel, TrainConfig};

fn main() -> clex::Result<()> {
    let corpus = planted_corpus(&PlantedConfig {
        sentences_per_period: 600,
        ..PlantedConfig::default()
    });
    let config = TrainConfig {
        dim: 50,
        epochs: 10,
        bucket_count: 50_000,
        ..TrainConfig::default()
    };
    let changed = corpus.labels.labels.iter().find(|(_, l)| **l == ChangeLabel::Changed).unwrap().0;
    let stable = corpus.labels.labels.iter().find(|(_, l)| **l == ChangeLabel::Unchanged).unwrap().0;

    // a stand-in for externally pretrained vectors: the first period's words
    let seed_space = clex::embed::sgns_train(&corpus.slices[0], &config, None)?;
    let mut external = VectorTable::new(config.dim);
    for w in seed_space.vocab().words() {
        external.insert(w.clone(), seed_space.word_vector(w)?)?;
    }

    let runs = [
        train_incremental(&corpus.slices, &config)?,
        train_internal(&corpus.slices, &config)?,
        train_backward_external(&corpus.slices, &external, &config)?,
    ];
    for run in &runs {
        let order: Vec<_> = run.stages.iter().map(|s| s.stage.as_str()).collect();
        let (a, b) = (run.space("EARLY").unwrap(), run.space("LATE").unwrap());
        let sim = |w: &str| -> clex::Result<f64> { cosine(&a.word_vector(w)?, &b.word_vector(w)?) };
        println!(
            "{:<12} stages {:?}: cos(changed {changed}) {:.3}, cos(stable {stable}) {:.3}",
            run.strategy.as_str(),
            order,
            sim(changed)?,
            sim(stable)?
        );
    }

    let path = std::env::temp_dir().join("clex-example-early.space");
    save_space(runs[0].space("EARLY").unwrap(), &path)?;
    let back = load_space(&path)?;
    println!("saved and reloaded {} ({} words, dim {})", path.display(), back.vocab().len(), back.dim());
    Ok(())
}
