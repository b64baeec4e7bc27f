use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embedding::{normalized_embedding, pair_embedding, permute_control, Variant};
use super::peaks::{peak_precision_at_k, PeakPrecision};
use crate::data::{Dataset, LayerStack};
use crate::error::{Error, Result};
use crate::features::{feature_index, summarize, SummaryConfig};
use crate::ph::{cloud_persistence, subsample_indices, Condition, Metric, PointCloud, Threshold};
use crate::seed;
use crate::stats::{mean, sample_variance};

/// Per-layer activation matrices (samples x neurons) for each condition.
pub trait LayerSource: Sync {
    fn layers(&self) -> Vec<u32>;
    fn has(&self, condition: Condition, layer: u32) -> bool;
    fn load(&self, condition: Condition, layer: u32) -> Result<PointCloud>;
}

impl LayerSource for Dataset {
    fn layers(&self) -> Vec<u32> {
        let mut l = self.manifest.layers.clone();
        l.sort_unstable();
        l.dedup();
        l
    }

    fn has(&self, condition: Condition, layer: u32) -> bool {
        self.path(condition, layer).is_ok()
    }

    fn load(&self, condition: Condition, layer: u32) -> Result<PointCloud> {
        Dataset::load(self, condition, layer)
    }
}

impl LayerSource for LayerStack {
    fn layers(&self) -> Vec<u32> {
        (0..self.clean.len() as u32).collect()
    }

    fn has(&self, condition: Condition, layer: u32) -> bool {
        match condition {
            Condition::Clean => (layer as usize) < self.clean.len(),
            Condition::Poisoned => (layer as usize) < self.poisoned.len(),
            _ => false,
        }
    }

    fn load(&self, condition: Condition, layer: u32) -> Result<PointCloud> {
        let stack = match condition {
            Condition::Clean => &self.clean,
            Condition::Poisoned => &self.poisoned,
            other => return Err(Error::Coverage(vec![format!("{other}/layer {layer}")])),
        };
        stack
            .get(layer as usize)
            .cloned()
            .ok_or_else(|| Error::Coverage(vec![format!("{condition}/layer {layer}")]))
    }
}

pub const DEFAULT_SWEEP_SAMPLES: usize = 1000;

pub fn default_statistics() -> Vec<String> {
    [
        "total_persistence_0bars",
        "total_persistence_1bars",
        "mean_death_0bars",
        "mean_birth_1bars",
        "mean_death_1bars",
        "entropy_0bars",
        "entropy_1bars",
    ]
    .map(String::from)
    .to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Layer distance within each pair.
    pub interval: usize,
    /// Samples per condition.
    pub n: usize,
    /// Summary feature names to track.
    pub statistics: Vec<String>,
    pub variants: Vec<Variant>,
    pub adversarial: Condition,
    pub summary: SummaryConfig,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            interval: 1,
            n: DEFAULT_SWEEP_SAMPLES,
            statistics: default_statistics(),
            variants: Variant::ALL.to_vec(),
            adversarial: Condition::Poisoned,
            summary: SummaryConfig::default(),
            seed: 0,
        }
    }
}

/// One statistic of one variant at one layer pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub layers: (u32, u32),
    pub variant: Variant,
    pub statistic: String,
    pub mean_clean: f64,
    pub mean_adversarial: f64,
    pub variance_clean: f64,
    pub variance_adversarial: f64,
    /// Sample variance of both conditions' values taken together.
    pub pooled_variance: f64,
    /// `mean_clean / mean_adversarial`; absent when the denominator is 0.
    pub ratio: Option<f64>,
    pub abs_diff: f64,
    #[serde(skip)]
    pub values_clean: Vec<f64>,
    #[serde(skip)]
    pub values_adversarial: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    MeanClean,
    MeanAdversarial,
    PooledVariance,
    Ratio,
    AbsDiff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSweep {
    pub config: SweepConfig,
    pub pairs: Vec<(u32, u32)>,
    /// Rows used from every layer of both conditions.
    pub sample_ids: Vec<usize>,
    /// Ordered by variant, then statistic, then pair.
    pub points: Vec<SweepPoint>,
}

impl LayerSweep {
    pub fn point(&self, variant: Variant, statistic: &str, pair: usize) -> Option<&SweepPoint> {
        self.points
            .iter()
            .filter(|p| p.variant == variant && p.statistic == statistic)
            .nth(pair)
    }

    /// One value per layer pair. A missing ratio becomes NaN.
    pub fn curve(&self, variant: Variant, statistic: &str, kind: CurveKind) -> Vec<f64> {
        self.points
            .iter()
            .filter(|p| p.variant == variant && p.statistic == statistic)
            .map(|p| match kind {
                CurveKind::MeanClean => p.mean_clean,
                CurveKind::MeanAdversarial => p.mean_adversarial,
                CurveKind::PooledVariance => p.pooled_variance,
                CurveKind::Ratio => p.ratio.unwrap_or(f64::NAN),
                CurveKind::AbsDiff => p.abs_diff,
            })
            .collect()
    }

    /// One row per layer pair x condition x variant x statistic.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "layer_a",
            "layer_b",
            "variant",
            "statistic",
            "condition",
            "mean",
            "variance",
            "pooled_variance",
            "ratio",
            "abs_diff",
        ])?;
        for p in &self.points {
            for (cond, m, v) in [
                (Condition::Clean, p.mean_clean, p.variance_clean),
                (self.config.adversarial, p.mean_adversarial, p.variance_adversarial),
            ] {
                w.write_record([
                    p.layers.0.to_string(),
                    p.layers.1.to_string(),
                    p.variant.to_string(),
                    p.statistic.clone(),
                    cond.to_string(),
                    m.to_string(),
                    v.to_string(),
                    p.pooled_variance.to_string(),
                    p.ratio.map(|r| r.to_string()).unwrap_or_default(),
                    p.abs_diff.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Layer pairs `(l, l + interval)` over the source's layer axis.
pub fn layer_pairs(layers: &[u32], interval: usize) -> Result<Vec<(u32, u32)>> {
    if interval == 0 {
        return Err(Error::InvalidInput("interval must be >= 1".into()));
    }
    if interval >= layers.len() {
        return Err(Error::Axis(format!(
            "interval {interval} leaves no pairs on an axis of {} layers",
            layers.len()
        )));
    }
    let last = *layers.last().expect("non-empty axis");
    Ok(layers
        .iter()
        .filter(|&&l| l as u64 + interval as u64 <= last as u64)
        .map(|&l| (l, l + interval as u32))
        .collect())
}

fn embedding_values(
    a: &[f64],
    b: &[f64],
    variants: &[Variant],
    stat_idx: &[usize],
    summary: SummaryConfig,
    perm_seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let mut normalized = None;
    variants
        .iter()
        .map(|&v| {
            let e = match v {
                Variant::Original => pair_embedding(a, b)?,
                Variant::Normalized => normalized.get_or_insert(normalized_embedding(a, b)?).clone(),
                Variant::NormalizedPermuted => {
                    permute_control(normalized.get_or_insert(normalized_embedding(a, b)?), perm_seed)
                }
            };
            let bc = cloud_persistence(&e.to_cloud()?, Metric::Euclidean, 1, Threshold::Auto)?;
            let s = summarize(&bc, summary);
            Ok(stat_idx.iter().map(|&j| s.values[j]).collect())
        })
        .collect()
}

/// Mean barcode statistics of per-sample layer-pair embeddings along the
/// layer axis, for each variant and both conditions.
pub fn layer_sweep(source: &dyn LayerSource, config: &SweepConfig) -> Result<LayerSweep> {
    let stat_idx = config
        .statistics
        .iter()
        .map(|s| feature_index(s).ok_or_else(|| Error::InvalidInput(format!("unknown statistic {s:?}"))))
        .collect::<Result<Vec<usize>>>()?;
    if config.n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let conditions = [Condition::Clean, config.adversarial];
    let pairs = layer_pairs(&source.layers(), config.interval)?;
    let mut missing = Vec::new();
    for &(a, b) in &pairs {
        for c in conditions {
            if !source.has(c, a) || !source.has(c, b) {
                missing.push(format!("{c}/layers ({a}, {b})"));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Coverage(missing));
    }

    let mut clouds: BTreeMap<(Condition, u32), PointCloud> = BTreeMap::new();
    for c in conditions {
        for &(a, b) in &pairs {
            for l in [a, b] {
                if let std::collections::btree_map::Entry::Vacant(slot) = clouds.entry((c, l)) {
                    slot.insert(source.load(c, l)?);
                }
            }
        }
    }
    let n_rows = clouds.values().map(PointCloud::len).min().unwrap_or(0);
    if let Some(((c, l), cl)) = clouds.iter().find(|(_, cl)| cl.len() != n_rows) {
        return Err(Error::Size(format!(
            "{c} layer {l} has {} samples, expected {n_rows}",
            cl.len()
        )));
    }
    // the same sample ids and neuron permutations serve both conditions
    let ids = subsample_indices(n_rows, config.n, seed::derive(config.seed, &[0x5a]))?;

    // per condition: per pair: per sample: per variant: per statistic
    let mut per_condition = Vec::with_capacity(2);
    for c in conditions {
        let values = pairs
            .iter()
            .map(|&(a, b)| {
                ids.par_iter()
                    .map(|&s| {
                        let perm_seed = seed::derive(config.seed, &[a as u64, b as u64, s as u64]);
                        embedding_values(
                            clouds[&(c, a)].point(s),
                            clouds[&(c, b)].point(s),
                            &config.variants,
                            &stat_idx,
                            config.summary,
                            perm_seed,
                        )
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        per_condition.push(values);
    }

    let mut points = Vec::new();
    for (vi, &variant) in config.variants.iter().enumerate() {
        for (si, stat) in config.statistics.iter().enumerate() {
            for (pi, &pair) in pairs.iter().enumerate() {
                let column = |c: usize| -> Vec<f64> { per_condition[c][pi].iter().map(|s| s[vi][si]).collect() };
                let (xc, xa) = (column(0), column(1));
                let (mc, ma) = (mean(&xc), mean(&xa));
                let pooled: Vec<f64> = xc.iter().chain(&xa).copied().collect();
                points.push(SweepPoint {
                    layers: pair,
                    variant,
                    statistic: stat.clone(),
                    mean_clean: mc,
                    mean_adversarial: ma,
                    variance_clean: sample_variance(&xc),
                    variance_adversarial: sample_variance(&xa),
                    pooled_variance: sample_variance(&pooled),
                    ratio: (ma != 0.0).then(|| mc / ma),
                    abs_diff: (mc - ma).abs(),
                    values_clean: xc,
                    values_adversarial: xa,
                });
            }
        }
    }
    Ok(LayerSweep {
        config: config.clone(),
        pairs,
        sample_ids: ids,
        points,
    })
}

/// One precision@k comparison of the pooled-variance and difference curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakRow {
    pub variant: Variant,
    pub statistic: String,
    pub k: usize,
    pub result: Option<PeakPrecision>,
    pub error: Option<String>,
}

pub const DEFAULT_PEAK_KS: [usize; 3] = [1, 3, 5];

/// Peak agreement between each statistic's pooled-variance curve and its
/// clean-vs-adversarial difference curve, for every `k`.
pub fn peak_table(sweep: &LayerSweep, ks: &[usize], n_permutations: usize, seed: u64) -> Vec<PeakRow> {
    let mut rows = Vec::new();
    for &variant in &sweep.config.variants {
        for stat in &sweep.config.statistics {
            let var = sweep.curve(variant, stat, CurveKind::PooledVariance);
            let diff = sweep.curve(variant, stat, CurveKind::AbsDiff);
            for &k in ks {
                let r = peak_precision_at_k(&var, &diff, k, n_permutations, seed);
                rows.push(PeakRow {
                    variant,
                    statistic: stat.clone(),
                    k,
                    error: r.as_ref().err().map(ToString::to_string),
                    result: r.ok(),
                });
            }
        }
    }
    rows
}

pub fn write_peak_csv<W: Write>(out: W, rows: &[PeakRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variant", "statistic", "k", "precision", "p_value", "method", "error"])?;
    for r in rows {
        let (p, pv, m) = match &r.result {
            Some(res) => (
                res.precision.to_string(),
                res.p_value.to_string(),
                serde_json::to_value(res.method)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
            ),
            None => Default::default(),
        };
        w.write_record([
            r.variant.to_string(),
            r.statistic.clone(),
            r.k.to_string(),
            p,
            pv,
            m,
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
