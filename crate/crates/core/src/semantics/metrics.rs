use serde::{Deserialize, Serialize};

use super::stats::{mean, pearson, variance, welch_t_test};
use super::SimilarityRow;
use crate::corpus::ChangeLabel;
use crate::{Error, Result};

/// p-value below which a result counts as significant.
pub const SIGNIFICANCE_LEVEL: f64 = 0.01;

/// Evaluation of one transition against the gold labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsResult {
    pub transition: String,
    /// `mean_unchanged - mean_changed`.
    pub delta_mu: f64,
    /// Welch t of unchanged against changed.
    #[serde(with = "lossless_f64")]
    pub t_statistic: f64,
    pub t_df: f64,
    pub t_p_value: f64,
    /// Both groups had zero variance.
    pub t_degenerate: bool,
    /// Point-biserial correlation of label (1 = changed) with cosine.
    pub rho: f64,
    pub rho_p_value: f64,
    pub n_changed: usize,
    pub n_unchanged: usize,
    pub mean_changed: f64,
    pub mean_unchanged: f64,
    /// Mean cosine over both groups.
    pub mean_all: f64,
    pub ci95_changed: [f64; 2],
    pub ci95_unchanged: [f64; 2],
    /// Sorted labeled words the statistics were computed on.
    pub words: Vec<String>,
}

impl MetricsResult {
    pub fn delta_mu_significant(&self) -> bool {
        self.t_p_value < SIGNIFICANCE_LEVEL
    }

    pub fn rho_significant(&self) -> bool {
        self.rho_p_value < SIGNIFICANCE_LEVEL
    }
}

/// Normal-approximation 95% interval `mean ± 1.96 sd / sqrt(n)`.
pub(crate) fn ci95(values: &[f64]) -> [f64; 2] {
    let m = mean(values);
    let half = 1.96 * (variance(values) / values.len() as f64).sqrt();
    [m - half, m + half]
}

/// Labeled cosines for one transition, each group sorted so that statistics
/// do not depend on row order.
pub(crate) fn labeled_values(rows: &[SimilarityRow], transition: &str) -> (Vec<f64>, Vec<f64>, Vec<String>) {
    let (mut changed, mut unchanged, mut words) = (Vec::new(), Vec::new(), Vec::new());
    for row in rows {
        let (Some(label), Some(&c)) = (row.label, row.cos.get(transition)) else {
            continue;
        };
        match label {
            ChangeLabel::Changed => changed.push(c),
            ChangeLabel::Unchanged => unchanged.push(c),
        }
        words.push(row.word.clone());
    }
    changed.sort_by(f64::total_cmp);
    unchanged.sort_by(f64::total_cmp);
    words.sort();
    (changed, unchanged, words)
}

/// Mean difference, Welch t-test and point-biserial correlation over the
/// labeled rows that carry a cosine for `transition`.
pub fn compute_metrics(rows: &[SimilarityRow], transition: &str) -> Result<MetricsResult> {
    let (changed, unchanged, words) = labeled_values(rows, transition);
    if changed.is_empty() || unchanged.is_empty() {
        return Err(Error::Stats(format!(
            "{transition}: constant label vector ({} changed, {} unchanged)",
            changed.len(),
            unchanged.len()
        )));
    }
    if changed.len() < 2 || unchanged.len() < 2 {
        return Err(Error::Stats(format!(
            "{transition}: need at least 2 rows per label group ({} changed, {} unchanged)",
            changed.len(),
            unchanged.len()
        )));
    }

    let (mean_changed, mean_unchanged) = (mean(&changed), mean(&unchanged));
    let welch = welch_t_test(&unchanged, &changed)?;

    let labels: Vec<f64> = std::iter::repeat_n(1.0, changed.len())
        .chain(std::iter::repeat_n(0.0, unchanged.len()))
        .collect();
    let cosines: Vec<f64> = changed.iter().chain(&unchanged).copied().collect();
    let corr = pearson(&labels, &cosines).map_err(|e| Error::Stats(format!("{transition}: {e}")))?;

    Ok(MetricsResult {
        transition: transition.to_string(),
        delta_mu: mean_unchanged - mean_changed,
        t_statistic: welch.t,
        t_df: welch.df,
        t_p_value: welch.p,
        t_degenerate: welch.degenerate,
        rho: corr.r,
        rho_p_value: corr.p,
        n_changed: changed.len(),
        n_unchanged: unchanged.len(),
        mean_changed,
        mean_unchanged,
        mean_all: mean(&cosines),
        ci95_changed: ci95(&changed),
        ci95_unchanged: ci95(&unchanged),
        words,
    })
}

/// JSON has no infinities; write them as strings.
mod lossless_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn rows(values: &[(f64, Option<u8>)]) -> Vec<SimilarityRow> {
        values
            .iter()
            .enumerate()
            .map(|(i, &(c, l))| SimilarityRow {
                word: format!("w{i:02}"),
                cos: BTreeMap::from([("AN".to_string(), c)]),
                label: l.map(|l| ChangeLabel::try_from(l).unwrap()),
            })
            .collect()
    }

    #[test]
    fn simple_delta() {
        let m = compute_metrics(&rows(&[(0.9, Some(0)), (0.9, Some(0)), (0.7, Some(1)), (0.7, Some(1))]), "AN").unwrap();
        assert!((m.delta_mu - 0.2).abs() < 1e-12);
        assert_eq!(m.delta_mu, m.mean_unchanged - m.mean_changed);
        assert!(m.t_degenerate);
        assert_eq!(m.t_statistic, f64::INFINITY);
        assert_eq!(m.t_p_value, 0.0);
        assert_eq!(m.n_changed + m.n_unchanged, 4);
    }

    #[test]
    fn constant_labels() {
        let err = compute_metrics(&rows(&[(0.9, Some(0)), (0.8, Some(0)), (0.7, Some(0))]), "AN").unwrap_err();
        assert!(err.to_string().contains("constant label vector"), "{err}");
    }

    #[test]
    fn unlabeled_and_other_transitions_skipped() {
        let mut r = rows(&[(0.9, Some(0)), (0.8, Some(0)), (0.3, Some(1)), (0.4, Some(1)), (0.1, None)]);
        r[0].cos = BTreeMap::from([("NP".to_string(), 0.5)]);
        assert!(compute_metrics(&r, "AN").is_err());
        r.push(rows(&[(0.95, Some(0))]).remove(0));
        r.last_mut().unwrap().word = "extra".into();
        let m = compute_metrics(&r, "AN").unwrap();
        assert_eq!((m.n_changed, m.n_unchanged), (2, 2));
    }

    #[test]
    fn infinite_t_survives_json() {
        let m = compute_metrics(&rows(&[(0.9, Some(0)), (0.9, Some(0)), (0.7, Some(1)), (0.7, Some(1))]), "AN").unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"t_statistic\":\"inf\""));
        let back: MetricsResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
