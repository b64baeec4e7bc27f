use std::io::Write;

use serde::{Deserialize, Serialize};

use super::logistic::LinearModel;
use crate::error::{Error, Result};

/// Exact Shapley values of a linear logit against a mean background.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapValues {
    pub feature_names: Vec<String>,
    pub base_value: f64,
    /// `attributions[i][j]` for row `i`, feature `j`.
    pub attributions: Vec<Vec<f64>>,
    pub logits: Vec<f64>,
}

pub fn linear_shap(
    model: &LinearModel,
    rows: &[Vec<f64>],
    background_means: &[f64],
    feature_names: &[String],
) -> Result<ShapValues> {
    let p = model.weights.len();
    if background_means.len() != p || feature_names.len() != p {
        return Err(Error::Size(format!(
            "model has {p} weights, background {} and names {}",
            background_means.len(),
            feature_names.len()
        )));
    }
    let attributions: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            model
                .weights
                .iter()
                .zip(r)
                .zip(background_means)
                .map(|((w, x), m)| w * (x - m))
                .collect()
        })
        .collect();
    Ok(ShapValues {
        feature_names: feature_names.to_vec(),
        base_value: model.logit(background_means),
        logits: rows.iter().map(|r| model.logit(r)).collect(),
        attributions,
    })
}

impl ShapValues {
    pub fn mean_abs(&self) -> Vec<f64> {
        let n = self.attributions.len().max(1) as f64;
        (0..self.feature_names.len())
            .map(|j| self.attributions.iter().map(|a| a[j].abs()).sum::<f64>() / n)
            .collect()
    }

    /// Feature indices by descending mean |attribution|, ties by index.
    pub fn importance_order(&self) -> Vec<usize> {
        let m = self.mean_abs();
        let mut order: Vec<usize> = (0..m.len()).collect();
        order.sort_by(|&a, &b| m[b].total_cmp(&m[a]).then(a.cmp(&b)));
        order
    }

    /// Largest deviation of `base + sum(attributions)` from the logit.
    pub fn additivity_error(&self) -> f64 {
        self.attributions
            .iter()
            .zip(&self.logits)
            .map(|(a, l)| (self.base_value + a.iter().sum::<f64>() - l).abs())
            .fold(0.0, f64::max)
    }

    /// Long-format rows `feature,row,feature_value,attribution,mean_abs`,
    /// features ordered by importance.
    pub fn write_beeswarm_csv<W: Write>(&self, out: W, rows: &[Vec<f64>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["feature", "row", "feature_value", "attribution", "mean_abs_attribution"])?;
        let mean_abs = self.mean_abs();
        for j in self.importance_order() {
            for (i, a) in self.attributions.iter().enumerate() {
                w.write_record([
                    self.feature_names[j].clone(),
                    i.to_string(),
                    rows[i][j].to_string(),
                    a[j].to_string(),
                    mean_abs[j].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
