//! Builds a report bundle from evaluated similarity rows and renders it as a
//! single HTML file with inline SVG histograms.
//!
//! cargo run --example render_report

use clex::corpus::ChangeLabel;
use clex::embed::{InitStrategy, SweepCell, SweepReport};
use clex::report::{write_html, ModelReport, ReportBundle, TransitionReport};
use clex::semantics::{compute_metrics, distribution_summary, SimilarityRow};

fn main() -> clex::Result<()> {
    let rows: Vec<SimilarityRow> = (0..40)
        .map(|i| {
            let changed = i % 5 == 0;
            let base = if changed { 0.55 } else { 0.8 };
            SimilarityRow {
                word: format!("w{i:02}"),
                cos: [("AN".to_string(), base + 0.15 * ((i * 37 % 11) as f64 / 10.0 - 0.5))].into(),
                label: Some(if changed { ChangeLabel::Changed } else { ChangeLabel::Unchanged }),
            }
        })
        .collect();

    let mut bundle = ReportBundle::new();
    bundle.models.push(ModelReport {
        name: "example".into(),
        transitions: vec![TransitionReport {
            metrics: compute_metrics(&rows, "AN")?,
            distribution: distribution_summary(&rows, "AN")?,
        }],
        comparison: None,
        coverage: vec![],
    });
    let (dims, epochs) = (vec![100, 300], vec![10, 30, 50]);
    let cells = dims
        .iter()
        .flat_map(|&d| {
            epochs.iter().map(move |&e| SweepCell {
                dim: d,
                epochs: e,
                delta_mu: 0.01 * e as f64 / d as f64 * 10.0,
                rho: -0.002 * e as f64,
            })
        })
        .collect();
    bundle.sweeps.push(SweepReport {
        strategy: InitStrategy::Incremental,
        dims,
        epochs,
        cells,
    });

    let dir = std::env::temp_dir();
    bundle.save(dir.join("clex-example-bundle.json"))?;
    let html = dir.join("clex-example-report.html");
    write_html(&bundle, &html)?;
    println!("wrote {}", html.display());
    Ok(())
}
