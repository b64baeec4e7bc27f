use serde::{Deserialize, Serialize};

use super::table::SummaryTable;
use crate::error::{Error, Result};
use crate::features::feature_names;
use crate::stats::pearson;

pub const DEFAULT_PRUNE_THRESHOLD: f64 = 0.5;

/// Default sweep order: mean death of 0-bars first, the rest in naming order.
pub fn default_priority() -> Vec<String> {
    let names = feature_names();
    let first = "mean_death_0bars";
    std::iter::once(first.to_string())
        .chain(names.iter().filter(|n| *n != first).cloned())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneResult {
    pub threshold: f64,
    pub kept: Vec<String>,
    pub dropped_constant: Vec<String>,
    /// Pearson correlations between all input columns; zero wherever a
    /// column is constant.
    pub correlation: Vec<Vec<f64>>,
}

/// Greedy correlation pruning.
///
/// Constant columns are dropped first. The remaining columns are visited in
/// `priority` order and a column is kept iff its absolute correlation with
/// every column kept so far is at most `threshold`.
pub fn correlation_prune(table: &SummaryTable, threshold: f64, priority: &[String]) -> Result<PruneResult> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Domain(format!("threshold must lie in (0, 1], got {threshold}")));
    }
    if table.n_rows() < 2 {
        return Err(Error::Size(format!(
            "correlation needs >= 2 rows, got {}",
            table.n_rows()
        )));
    }
    let p = table.n_features();
    let mut order = Vec::with_capacity(p);
    for name in priority {
        let j = table
            .column_index(name)
            .ok_or_else(|| Error::InvalidInput(format!("priority names unknown feature {name}")))?;
        if !order.contains(&j) {
            order.push(j);
        }
    }
    if order.len() != p {
        return Err(Error::InvalidInput(format!(
            "priority covers {} of {p} features",
            order.len()
        )));
    }

    let columns: Vec<Vec<f64>> = (0..p).map(|j| table.column(j)).collect();
    let constant: Vec<bool> = columns.iter().map(|c| c.iter().all(|&v| v == c[0])).collect();
    let mut correlation = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in a..p {
            let r = if a == b && !constant[a] {
                1.0
            } else {
                pearson(&columns[a], &columns[b]).unwrap_or(0.0)
            };
            correlation[a][b] = r;
            correlation[b][a] = r;
        }
    }

    let mut kept: Vec<usize> = Vec::new();
    for &j in &order {
        if constant[j] {
            continue;
        }
        if kept.iter().all(|&k| correlation[j][k].abs() <= threshold) {
            kept.push(j);
        }
    }
    Ok(PruneResult {
        threshold,
        kept: kept.iter().map(|&j| table.feature_names[j].clone()).collect(),
        dropped_constant: (0..p)
            .filter(|&j| constant[j])
            .map(|j| table.feature_names[j].clone())
            .collect(),
        correlation,
    })
}
