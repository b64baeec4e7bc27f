use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::sample_std;

/// Default target resolution for summary features.
pub const DEFAULT_DELTA_STAR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetCheck {
    pub k: usize,
    pub delta_star: f64,
    pub feature_names: Vec<String>,
    pub standard_errors: Vec<f64>,
    /// `standard_errors[j] <= delta_star / 2`.
    pub pass: Vec<bool>,
}

impl BudgetCheck {
    pub fn all_pass(&self) -> bool {
        self.pass.iter().all(|&p| p)
    }
}

/// Monte-Carlo standard error `s / sqrt(K)` per feature, where `samples[s][j]`
/// is feature `j` on subsample `s`.
pub fn subsample_budget_check(samples: &[Vec<f64>], feature_names: &[String], delta_star: f64) -> Result<BudgetCheck> {
    let k = samples.len();
    if k < 2 {
        return Err(Error::Size(format!("budget check needs K >= 2 subsamples, got {k}")));
    }
    if !(delta_star > 0.0) {
        return Err(Error::Domain(format!("delta* must be positive, got {delta_star}")));
    }
    let p = feature_names.len();
    if let Some(r) = samples.iter().find(|r| r.len() != p) {
        return Err(Error::Size(format!(
            "subsample has {} values for {p} features",
            r.len()
        )));
    }
    let standard_errors: Vec<f64> = (0..p)
        .map(|j| {
            let col: Vec<f64> = samples.iter().map(|r| r[j]).collect();
            sample_std(&col) / (k as f64).sqrt()
        })
        .collect();
    let pass = standard_errors.iter().map(|&se| se <= delta_star / 2.0).collect();
    Ok(BudgetCheck {
        k,
        delta_star,
        feature_names: feature_names.to_vec(),
        standard_errors,
        pass,
    })
}
