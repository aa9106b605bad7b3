//! Trains incrementally aligned spaces on a corpus with planted meaning
//! changes and checks that the changed words come out less similar.
//!
//! cargo run --release --example planted_change

use std::time::Instant;

use clex::embed::train_incremental;
use clex::semantics::{attach_labels, compute_metrics, pair_similarities, Transition};
use clex::synthetic::{planted_corpus, PlantedConfig};
use clex::TrainConfig;

fn main() -> clex::Result<()> {
    let corpus = planted_corpus(&PlantedConfig::default());
    let config = TrainConfig {
        dim: 100,
        epochs: 30,
        bucket_count: 100_000,
        threads: 1,
        seed: 11,
        ..TrainConfig::default()
    };

    let started = Instant::now();
    let run = train_incremental(&corpus.slices, &config)?;
    println!("trained {} periods in {:.1?}", run.spaces.len(), started.elapsed());

    let transition = &Transition::consecutive(&["EARLY", "LATE"])[0];
    let (mut rows, coverage) = pair_similarities(
        run.space("EARLY").unwrap(),
        run.space("LATE").unwrap(),
        &corpus.targets(),
        &transition.name,
    )?;
    attach_labels(&mut rows, &corpus.labels);
    let m = compute_metrics(&rows, &transition.name)?;

    println!("compared {} targets, {} missing", coverage.compared, coverage.missing.len());
    println!("mean cosine  changed {:.3}  unchanged {:.3}", m.mean_changed, m.mean_unchanged);
    println!("delta_mu {:.4}  (Welch t {:.2}, p {:.2e})", m.delta_mu, m.t_statistic, m.t_p_value);
    println!("rho      {:.4}  (p {:.2e})", m.rho, m.rho_p_value);
    Ok(())
}
