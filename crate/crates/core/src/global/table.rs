use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{feature_names, BarcodeSummary};
use crate::ph::Condition;

/// Rows of features with binary labels (0 = clean, 1 = adversarial).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub layer: Option<u32>,
}

impl SummaryTable {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<u8>, layer: Option<u32>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Size(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != feature_names.len()) {
            return Err(Error::Size(format!(
                "row {i} has {} values for {} features",
                r.len(),
                feature_names.len()
            )));
        }
        if let Some(l) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidInput(format!("labels must be 0 or 1, got {l}")));
        }
        Ok(SummaryTable {
            feature_names,
            rows,
            labels,
            layer,
        })
    }

    /// Labels come from provenance: clean is 0, any other condition is 1.
    pub fn from_summaries(summaries: &[BarcodeSummary], layer: Option<u32>) -> Result<Self> {
        let labels = summaries
            .iter()
            .map(|s| match s.provenance.condition {
                Some(Condition::Clean) => Ok(0),
                Some(_) => Ok(1),
                None => Err(Error::InvalidInput("summary without a condition label".into())),
            })
            .collect::<Result<Vec<u8>>>()?;
        let rows = summaries.iter().map(|s| s.values.clone()).collect();
        SummaryTable::new(feature_names().to_vec(), rows, labels, layer)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// Table restricted to the named columns, in that order.
    pub fn select(&self, names: &[String]) -> Result<SummaryTable> {
        let idx = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown feature {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = self.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect();
        Ok(SummaryTable {
            feature_names: names.to_vec(),
            rows,
            labels: self.labels.clone(),
            layer: self.layer,
        })
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        (self.labels.len() - ones, ones)
    }

    pub fn require_fit_ready(&self) -> Result<()> {
        if self.n_rows() < 4 {
            return Err(Error::Size(format!("need at least 4 rows, got {}", self.n_rows())));
        }
        let (zeros, ones) = self.class_counts();
        if zeros == 0 || ones == 0 {
            return Err(Error::Stratification(format!(
                "both classes must be present (clean {zeros}, adversarial {ones})"
            )));
        }
        Ok(())
    }
}

/// Column-wise standardization to zero mean and unit population variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>], names: &[String]) -> Result<Self> {
        let p = names.len();
        let n = rows.len() as f64;
        let mut means = vec![0.0; p];
        for r in rows {
            for (m, v) in means.iter_mut().zip(r) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut stds = vec![0.0; p];
        for r in rows {
            for ((s, v), m) in stds.iter_mut().zip(r).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for (j, s) in stds.iter_mut().enumerate() {
            *s = (*s / n).sqrt();
            if !(*s > 0.0) {
                return Err(Error::Degenerate(format!("feature {} has zero variance", names[j])));
            }
        }
        Ok(Standardizer { means, stds })
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}
