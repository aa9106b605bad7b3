use serde::{Deserialize, Serialize};

use super::MetricsResult;
use crate::{Error, Result};

/// One directional expectation between two transitions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub name: String,
    pub description: String,
    pub holds: bool,
    pub first: f64,
    pub second: f64,
}

/// Whether the first transition shows more change than the second. Nothing
/// here is enforced; the booleans are reported as observed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub first: String,
    pub second: String,
    pub expectations: Vec<Expectation>,
}

impl ComparisonReport {
    pub fn get(&self, name: &str) -> Option<&Expectation> {
        self.expectations.iter().find(|e| e.name == name)
    }
}

/// Checks, with strict inequalities, that `first` has the larger mean
/// difference, the more negative correlation, and the lower overall mean
/// cosine.
pub fn compare_transitions(first: &MetricsResult, second: &MetricsResult) -> Result<ComparisonReport> {
    if first.words != second.words {
        return Err(Error::Validation(format!(
            "transitions {} and {} were evaluated on different target sets ({} vs {} words)",
            first.transition,
            second.transition,
            first.words.len(),
            second.words.len()
        )));
    }
    let (a, b) = (&first.transition, &second.transition);
    let expectation = |name: &str, description: String, holds: bool, x: f64, y: f64| Expectation {
        name: name.to_string(),
        description,
        holds,
        first: x,
        second: y,
    };
    Ok(ComparisonReport {
        first: a.clone(),
        second: b.clone(),
        expectations: vec![
            expectation(
                "delta_mu_larger",
                format!("delta_mu({a}) > delta_mu({b})"),
                first.delta_mu > second.delta_mu,
                first.delta_mu,
                second.delta_mu,
            ),
            expectation(
                "rho_more_negative",
                format!("rho({a}) < rho({b})"),
                first.rho < second.rho,
                first.rho,
                second.rho,
            ),
            expectation(
                "mean_cosine_smaller",
                format!("mean cosine({a}) < mean cosine({b})"),
                first.mean_all < second.mean_all,
                first.mean_all,
                second.mean_all,
            ),
        ],
    })
}
