//! Scores word vectors of three periods against change labels: cosine per
//! transition, mean difference with Welch's t-test, point-biserial
//! correlation, histograms, and the AN-vs-NP comparison.
//!
//! cargo run --example analyze_change

use std::collections::BTreeSet;

use clex::corpus::{ChangeLabel, ChangeLabelSet};
use clex::semantics::{
    attach_labels, compare_transitions, compute_metrics, distribution_summary, merge_rows, pair_similarities,
    Transition,
};
use clex::VectorTable;

/// Unit vector at `angle` radians; the cosine between two of them is the
/// cosine of the angle between.
fn rotated(angle: f64) -> Vec<f32> {
    vec![angle.cos() as f32, angle.sin() as f32]
}

fn main() -> clex::Result<()> {
    // drift per transition: changed words move a lot from ANG to NOR
    let drift = [
        ("finis", 1.1, 0.2),
        ("honorifice", 0.9, 0.3),
        ("feudum", 1.3, 0.1),
        ("terra", 0.2, 0.15),
        ("rex", 0.1, 0.2),
        ("ecclesia", 0.3, 0.25),
        ("dedi", 0.15, 0.1),
    ];
    let mut ang = VectorTable::new(2);
    let mut nor = VectorTable::new(2);
    let mut pla = VectorTable::new(2);
    for (w, an, np) in drift {
        ang.insert(w, rotated(0.0))?;
        nor.insert(w, rotated(an))?;
        pla.insert(w, rotated(an + np))?;
    }
    let labels = ChangeLabelSet {
        labels: drift
            .iter()
            .map(|(w, an, _)| (w.to_string(), if *an > 0.5 { ChangeLabel::Changed } else { ChangeLabel::Unchanged }))
            .collect(),
    };
    let targets: BTreeSet<String> = labels.words().map(str::to_string).collect();

    let transitions = Transition::consecutive(&["ANG", "NOR", "PLA"]);
    let spaces = [&ang, &nor, &pla];
    let mut sets = Vec::new();
    for (i, t) in transitions.iter().enumerate() {
        let (rows, coverage) = pair_similarities(spaces[i], spaces[i + 1], &targets, &t.name)?;
        println!("{}: {} compared, {} missing", t.name, coverage.compared, coverage.missing.len());
        sets.push(rows);
    }
    let mut rows = merge_rows(sets);
    attach_labels(&mut rows, &labels);

    let an = compute_metrics(&rows, "AN")?;
    let np = compute_metrics(&rows, "NP")?;
    for m in [&an, &np] {
        println!(
            "{}: delta_mu {:.3} (t {:.2}, p {:.3})  rho {:.3} (p {:.3})",
            m.transition, m.delta_mu, m.t_statistic, m.t_p_value, m.rho, m.rho_p_value
        );
    }
    let hist = distribution_summary(&rows, "AN")?;
    println!("AN changed histogram: {:?}", hist.changed.counts);
    for e in compare_transitions(&an, &np)?.expectations {
        println!("{}: {} ({:.3} vs {:.3})", e.description, e.holds, e.first, e.second);
    }
    Ok(())
}
