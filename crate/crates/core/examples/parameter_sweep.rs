//! Evaluates a grid of embedding sizes and epoch counts and prints the
//! heatmap data as CSV.
//!
//! cargo run --release --example parameter_sweep

use clex::embed::{sweep, InitStrategy};
use clex::semantics::{attach_labels, compute_metrics, pair_similarities};
use clex::synthetic::{planted_corpus, PlantedConfig};
use clex::TrainConfig;

fn main() -> clex::Result<()> {
    let corpus = planted_corpus(&PlantedConfig {
        sentences_per_period: 600,
        ..PlantedConfig::default()
    });
    let base = TrainConfig {
        bucket_count: 50_000,
        ..TrainConfig::default()
    };
    let targets = corpus.targets();
    let report = sweep(&corpus.slices, InitStrategy::Incremental, &[25, 50], &[2, 5, 10], &base, None, |run| {
        let (mut rows, _) = pair_similarities(run.space("EARLY").unwrap(), run.space("LATE").unwrap(), &targets, "EL")?;
        attach_labels(&mut rows, &corpus.labels);
        let m = compute_metrics(&rows, "EL")?;
        Ok((m.delta_mu, m.rho))
    })?;
    report.write_csv(std::io::stdout())?;
    Ok(())
}
