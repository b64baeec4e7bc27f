//! Layer-wise analysis: barcode summaries of clean and adversarial
//! subsamples, correlation pruning, PCA, CCA, logistic regression and
//! Shapley attributions.

mod budget;
mod cca;
mod logistic;
mod metrics;
mod pca;
mod prune;
mod shap;
mod table;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use budget::{subsample_budget_check, BudgetCheck, DEFAULT_DELTA_STAR};
pub use cca::{cca, CcaResult, CCA_RIDGE};
pub use logistic::{
    fit_logistic, stratified_folds, stratified_split, train_logistic, LinearModel, LogisticConfig, LogisticModel,
    RegressionReport,
};
pub use metrics::{accuracy, auc_rank, auc_trapezoid};
pub use pca::{pca, PcaResult};
pub use prune::{correlation_prune, default_priority, PruneResult, DEFAULT_PRUNE_THRESHOLD};
pub use shap::{linear_shap, ShapValues};
pub use table::{Standardizer, SummaryTable};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::features::{summarize, write_summaries_csv, BarcodeSummary, Provenance, SummaryConfig};
use crate::ph::{cloud_persistence, subsample, Condition, Metric, PointCloud, Threshold};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalConfig {
    /// Subsamples per condition (K).
    pub n_subsamples: usize,
    /// Points per subsample (k).
    pub subsample_size: usize,
    pub metric: Metric,
    pub threshold: Threshold,
    pub summary: SummaryConfig,
    pub prune_threshold: f64,
    /// Pruning order; `None` uses [`default_priority`].
    pub priority: Option<Vec<String>>,
    pub n_components: usize,
    pub logistic: LogisticConfig,
    pub delta_star: f64,
    /// Condition labelled 1 against clean.
    pub adversarial: Condition,
    pub seed: u64,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        GlobalConfig {
            n_subsamples: 32,
            subsample_size: 256,
            metric: Metric::Euclidean,
            threshold: Threshold::Auto,
            summary: SummaryConfig::default(),
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            priority: None,
            n_components: 2,
            logistic: LogisticConfig::default(),
            delta_star: DEFAULT_DELTA_STAR,
            adversarial: Condition::Poisoned,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalReport {
    pub layer: Option<u32>,
    pub n_rows: usize,
    pub class_counts: (usize, usize),
    pub kept_features: Vec<String>,
    pub prune: PruneResult,
    pub pca: PcaResult,
    pub cca: CcaResult,
    pub regression: RegressionReport,
    pub shap: ShapValues,
    /// Per-condition standard errors of the summaries, when computed from subsamples.
    pub budget: Vec<(Condition, BudgetCheck)>,
}

/// Summaries of `K` seeded subsamples of one condition's cloud at one layer.
pub fn subsample_summaries(
    cloud: &PointCloud,
    condition: Condition,
    layer: u32,
    config: &GlobalConfig,
) -> Result<Vec<BarcodeSummary>> {
    (0..config.n_subsamples as u64)
        .into_par_iter()
        .map(|s| {
            let sub = subsample(
                cloud,
                config.subsample_size,
                seed::derive(config.seed, &[layer as u64, condition.code() as u64, s]),
            )?;
            let barcode = cloud_persistence(&sub, config.metric, 1, config.threshold)?;
            Ok(summarize(&barcode, config.summary).with_provenance(Provenance {
                subsample: Some(s),
                layer: Some(layer),
                condition: Some(condition),
            }))
        })
        .collect()
}

/// Prune, decompose and classify one table.
pub fn analyze_table(table: &SummaryTable, config: &GlobalConfig) -> Result<GlobalReport> {
    table.require_fit_ready()?;
    let priority = config.priority.clone().unwrap_or_else(default_priority);
    let prune = correlation_prune(table, config.prune_threshold, &priority)?;
    if prune.kept.is_empty() {
        return Err(Error::Degenerate("every summary feature is constant".into()));
    }
    let pruned = table.select(&prune.kept)?;

    let n_components = config.n_components.clamp(1, prune.kept.len());
    let pca = pca(&pruned.rows, &pruned.feature_names, n_components)?;
    let standardized = pca.standardizer.transform(&pruned.rows);
    let cca = cca(&standardized, &pca.scores)?;

    let regression = fit_logistic(&pruned, &config.logistic, config.seed)?;
    let shap = linear_shap(
        &regression.raw_model,
        &pruned.rows,
        &regression.model.standardizer.means,
        &pruned.feature_names,
    )?;

    Ok(GlobalReport {
        layer: table.layer,
        n_rows: table.n_rows(),
        class_counts: table.class_counts(),
        kept_features: prune.kept.clone(),
        prune,
        pca,
        cca,
        regression,
        shap,
        budget: Vec::new(),
    })
}

/// Full layer analysis from a dataset: subsampling, barcodes, summaries and
/// [`analyze_table`]. Returns the report with the summaries it was built on.
pub fn run_layer(dataset: &Dataset, layer: u32, config: &GlobalConfig) -> Result<(GlobalReport, Vec<BarcodeSummary>)> {
    let clean = dataset.load(Condition::Clean, layer)?;
    let adversarial = dataset.load(config.adversarial, layer)?;
    run_clouds(&clean, &adversarial, layer, config)
}

/// [`run_layer`] on clouds already in memory.
pub fn run_clouds(
    clean: &PointCloud,
    adversarial: &PointCloud,
    layer: u32,
    config: &GlobalConfig,
) -> Result<(GlobalReport, Vec<BarcodeSummary>)> {
    let mut summaries = Vec::with_capacity(2 * config.n_subsamples);
    let mut budget = Vec::new();
    for (condition, cloud) in [(Condition::Clean, clean), (config.adversarial, adversarial)] {
        let part = subsample_summaries(cloud, condition, layer, config)?;
        let values: Vec<Vec<f64>> = part.iter().map(|s| s.values.clone()).collect();
        if values.len() >= 2 {
            budget.push((
                condition,
                subsample_budget_check(&values, crate::features::feature_names(), config.delta_star)?,
            ));
        }
        summaries.extend(part);
    }
    let table = SummaryTable::from_summaries(&summaries, Some(layer))?;
    let mut report = analyze_table(&table, config)?;
    report.budget = budget;
    Ok((report, summaries))
}

/// Every requested layer, processed concurrently, in input order.
pub fn run_global(
    dataset: &Dataset,
    layers: &[u32],
    config: &GlobalConfig,
) -> Result<Vec<(GlobalReport, Vec<BarcodeSummary>)>> {
    dataset.require(&[Condition::Clean, config.adversarial], layers)?;
    layers.par_iter().map(|&l| run_layer(dataset, l, config)).collect()
}

impl GlobalReport {
    /// `report.json`, `correlation.csv`, `pca_scores.csv`, `cca_loadings.csv`
    /// and `shap.csv` under `dir`. `table` is the one the report was built from.
    pub fn write_outputs(&self, dir: &Path, table: &SummaryTable) -> Result<()> {
        fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(self)?;
        fs::write(dir.join("report.json"), json + "\n")?;

        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("correlation.csv"))?));
        let names = crate::features::feature_names();
        let mut header = vec!["feature".to_string()];
        header.extend(names.iter().cloned());
        w.write_record(&header)?;
        for (name, row) in names.iter().zip(&self.prune.correlation) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("pca_scores.csv"))?));
        let mut header = vec!["row".to_string(), "label".to_string()];
        header.extend((1..=self.pca.loadings.len()).map(|c| format!("pc{c}")));
        w.write_record(&header)?;
        for (i, s) in self.pca.scores.iter().enumerate() {
            let mut rec = vec![i.to_string(), table.labels[i].to_string()];
            rec.extend(s.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("cca_loadings.csv"))?));
        w.write_record(["feature", "loading"])?;
        for (name, l) in self.kept_features.iter().zip(self.cca.first_loadings()) {
            w.write_record([name.clone(), l.to_string()])?;
        }
        w.flush()?;

        let pruned = table.select(&self.kept_features)?;
        self.shap
            .write_beeswarm_csv(BufWriter::new(File::create(dir.join("shap.csv"))?), &pruned.rows)
    }
}

pub fn write_summaries(path: &Path, summaries: &[BarcodeSummary]) -> Result<()> {
    write_summaries_csv(BufWriter::new(File::create(path)?), summaries)
}
