use serde::{Deserialize, Serialize};

use super::metrics::{ci95, labeled_values};
use super::stats::{mean, variance};
use super::SimilarityRow;
use crate::corpus::ChangeLabel;
use crate::{Error, Result};

pub const BIN_WIDTH: f64 = 0.05;
/// Bins covering `[0, 1]`.
pub const BIN_COUNT: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: ChangeLabel,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub ci95: [f64; 2],
    /// Counts per bin; values below 0 land in the first bin, 1.0 in the last.
    pub counts: Vec<u64>,
    /// Counts normalized so the histogram integrates to 1.
    pub density: Vec<f64>,
    /// How many values were below 0 and clamped into the first bin.
    pub below_range: u64,
}

/// Histograms and 95% intervals of the changed and unchanged groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub transition: String,
    pub bin_width: f64,
    pub changed: GroupSummary,
    pub unchanged: GroupSummary,
}

fn summarize(values: &[f64], label: ChangeLabel) -> Result<GroupSummary> {
    if values.len() < 2 {
        return Err(Error::Stats(format!(
            "{label:?} group has {} values, need at least 2",
            values.len()
        )));
    }
    let mut counts = vec![0u64; BIN_COUNT];
    let mut below_range = 0;
    for &v in values {
        if v < 0.0 {
            below_range += 1;
        }
        let bin = (v * BIN_COUNT as f64).floor().clamp(0.0, (BIN_COUNT - 1) as f64) as usize;
        counts[bin] += 1;
    }
    let n = values.len();
    let density = counts.iter().map(|&c| c as f64 / (n as f64 * BIN_WIDTH)).collect();
    Ok(GroupSummary {
        label,
        n,
        mean: mean(values),
        sd: variance(values).sqrt(),
        ci95: ci95(values),
        counts,
        density,
        below_range,
    })
}

pub fn distribution_summary(rows: &[SimilarityRow], transition: &str) -> Result<DistributionSummary> {
    let (changed, unchanged, _) = labeled_values(rows, transition);
    Ok(DistributionSummary {
        transition: transition.to_string(),
        bin_width: BIN_WIDTH,
        changed: summarize(&changed, ChangeLabel::Changed)?,
        unchanged: summarize(&unchanged, ChangeLabel::Unchanged)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_variance_group() {
        let g = summarize(&[0.5; 4], ChangeLabel::Unchanged).unwrap();
        assert_eq!(g.mean, 0.5);
        assert_eq!(g.ci95, [0.5, 0.5]);
        assert_eq!(g.counts[10], 4);
    }

    #[test]
    fn two_point_group() {
        let g = summarize(&[0.0, 1.0], ChangeLabel::Changed).unwrap();
        assert_eq!(g.mean, 0.5);
        let half = 1.96 * (0.5f64.sqrt() / 2f64.sqrt());
        assert!((g.ci95[0] - (0.5 - half)).abs() < 1e-12);
        assert!((g.ci95[1] - (0.5 + half)).abs() < 1e-12);
        assert_eq!(g.counts[0], 1);
        assert_eq!(g.counts[BIN_COUNT - 1], 1);
    }

    #[test]
    fn too_small() {
        assert!(summarize(&[0.3], ChangeLabel::Changed).is_err());
    }

    #[test]
    fn bin_edges() {
        let g = summarize(&[0.15, 0.05, -0.2, 0.999], ChangeLabel::Changed).unwrap();
        assert_eq!(g.counts[3], 1);
        assert_eq!(g.counts[1], 1);
        assert_eq!(g.counts[0], 1);
        assert_eq!(g.below_range, 1);
        assert_eq!(g.counts[19], 1);
    }

    proptest! {
        #[test]
        fn counts_conserved(values in proptest::collection::vec(-1.0f64..=1.0, 2..100)) {
            let g = summarize(&values, ChangeLabel::Unchanged).unwrap();
            prop_assert_eq!(g.counts.iter().sum::<u64>(), values.len() as u64);
            let area: f64 = g.density.iter().map(|d| d * BIN_WIDTH).sum();
            prop_assert!((area - 1.0).abs() < 1e-9);
        }
    }
}
