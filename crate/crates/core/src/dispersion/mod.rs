//! Dispersion of activation-difference representations: local PCA spread
//! ratios with Welch tests and FDR control, split ablations, and bootstrap
//! cosine distances.

mod ablation;
mod cosine;
mod ratio;
mod stats;

use serde::{Deserialize, Serialize};

pub use ablation::{partition, Comparison, Partition};
pub use cosine::{
    cosine_bootstrap, mean_pairwise_cosine_distance, CosineBootstrap, DEFAULT_BOOTSTRAP_ITERATIONS,
    DEFAULT_BOOTSTRAP_SUBSAMPLE,
};
pub use ratio::{local_dispersion_ratio, Dispersion, DEFAULT_NEIGHBORS, DISPERSION_EPS};
pub use stats::{bh_fdr, welch_t, WelchResult};

use crate::data::{DataKind, Dataset};
use crate::error::{Error, Result};
use crate::ph::{Condition, PointCloud};
use crate::seed;
use crate::stats::{mean, sample_std};

pub const SIGNIFICANCE: f64 = 0.05;

/// Per-input difference vectors of one layer with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffRepresentation {
    pub vectors: PointCloud,
    pub labels: Vec<Condition>,
    pub layer: u32,
}

impl DiffRepresentation {
    pub fn new(vectors: PointCloud, labels: Vec<Condition>, layer: u32) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(Error::Size(format!(
                "{} rows but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        Ok(DiffRepresentation { vectors, labels, layer })
    }

    /// Stacks labelled clouds of equal dimension.
    pub fn stack(parts: &[(Condition, PointCloud)], layer: u32) -> Result<Self> {
        let d = parts.first().map(|p| p.1.dim()).unwrap_or(0);
        let mut coords = Vec::new();
        let mut labels = Vec::new();
        for (c, cloud) in parts {
            if cloud.dim() != d {
                return Err(Error::Size(format!(
                    "{c} rows have dimension {}, expected {d}",
                    cloud.dim()
                )));
            }
            coords.extend_from_slice(cloud.coords());
            labels.extend(std::iter::repeat_n(*c, cloud.len()));
        }
        DiffRepresentation::new(PointCloud::new(coords, labels.len(), d)?, labels, layer)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerTestResult {
    pub layer: u32,
    pub comparison: Comparison,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub sem_a: f64,
    pub sem_b: f64,
    pub welch: WelchResult,
    /// Filled in by the FDR step across layers; equals the raw p until then.
    pub p_adjusted: f64,
    pub significant: bool,
}

fn group_test(values: &[f64], part: &Partition, layer: u32, comparison: Comparison) -> Result<LayerTestResult> {
    let a: Vec<f64> = part.a.iter().map(|&i| values[i]).collect();
    let b: Vec<f64> = part.b.iter().map(|&i| values[i]).collect();
    let welch = welch_t(&a, &b)?;
    Ok(LayerTestResult {
        layer,
        comparison,
        n_a: a.len(),
        n_b: b.len(),
        mean_a: mean(&a),
        mean_b: mean(&b),
        sem_a: sample_std(&a) / (a.len() as f64).sqrt(),
        sem_b: sample_std(&b) / (b.len() as f64).sqrt(),
        p_adjusted: welch.p_value,
        significant: welch.p_value < SIGNIFICANCE,
        welch,
    })
}

/// Dispersion ratios of one layer compared between the groups of `comparison`.
pub fn split_ablation(
    rep: &DiffRepresentation,
    comparison: Comparison,
    k: usize,
    seed: u64,
) -> Result<LayerTestResult> {
    let ratios: Vec<f64> = local_dispersion_ratio(&rep.vectors, k)?
        .iter()
        .map(|d| d.ratio)
        .collect();
    compare_ratios(&ratios, rep, comparison, seed)
}

/// Group test on precomputed per-row ratios.
pub fn compare_ratios(
    ratios: &[f64],
    rep: &DiffRepresentation,
    comparison: Comparison,
    seed: u64,
) -> Result<LayerTestResult> {
    let part = partition(&rep.labels, comparison, seed::derive(seed, &[rep.layer as u64]))?;
    group_test(ratios, &part, rep.layer, comparison)
}

/// Benjamini-Hochberg across the given layer results, in place.
pub fn adjust_across_layers(results: &mut [LayerTestResult]) -> Result<()> {
    let raw: Vec<f64> = results.iter().map(|r| r.welch.p_value).collect();
    for (r, q) in results.iter_mut().zip(bh_fdr(&raw)?) {
        r.p_adjusted = q;
        r.significant = q < SIGNIFICANCE;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionConfig {
    pub k_neighbors: usize,
    pub comparisons: Vec<Comparison>,
    pub subsample: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        DispersionConfig {
            k_neighbors: DEFAULT_NEIGHBORS,
            comparisons: vec![
                Comparison::CleanVsAdversarial,
                Comparison::CleanClean,
                Comparison::PoisonedPoisoned,
                Comparison::MixedMixed,
            ],
            subsample: DEFAULT_BOOTSTRAP_SUBSAMPLE,
            iterations: DEFAULT_BOOTSTRAP_ITERATIONS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineResult {
    pub layer: u32,
    pub comparison: Comparison,
    pub bootstrap: CosineBootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    pub config: DispersionConfig,
    pub layers: Vec<u32>,
    /// Per comparison, one result per layer, FDR-adjusted across layers.
    pub tests: Vec<Vec<LayerTestResult>>,
    pub cosine: Vec<CosineResult>,
    /// Neighbourhood ranks per layer, as `(layer, min, max)`.
    pub ranks: Vec<(u32, usize, usize)>,
}

/// Dispersion tests and cosine bootstraps over layers.
pub fn run_dispersion(reps: &[DiffRepresentation], config: &DispersionConfig) -> Result<DispersionReport> {
    let mut tests: Vec<Vec<LayerTestResult>> = vec![Vec::new(); config.comparisons.len()];
    let mut cosine = Vec::new();
    let mut ranks = Vec::new();
    for rep in reps {
        let disp = local_dispersion_ratio(&rep.vectors, config.k_neighbors)?;
        let ratios: Vec<f64> = disp.iter().map(|d| d.ratio).collect();
        let r = disp.iter().map(|d| d.rank);
        ranks.push((rep.layer, r.clone().min().unwrap_or(0), r.max().unwrap_or(0)));
        for (ci, &c) in config.comparisons.iter().enumerate() {
            tests[ci].push(compare_ratios(&ratios, rep, c, config.seed)?);
            let part = partition(&rep.labels, c, seed::derive(config.seed, &[rep.layer as u64]))?;
            cosine.push(CosineResult {
                layer: rep.layer,
                comparison: c,
                bootstrap: cosine_bootstrap(
                    &rep.vectors,
                    &part.a,
                    &part.b,
                    config.subsample,
                    config.iterations,
                    seed::derive(config.seed, &[0xc0, rep.layer as u64]),
                )?,
            });
        }
    }
    for per_layer in &mut tests {
        adjust_across_layers(per_layer)?;
    }
    Ok(DispersionReport {
        config: config.clone(),
        layers: reps.iter().map(|r| r.layer).collect(),
        tests,
        cosine,
        ranks,
    })
}

/// Difference representations from a dataset. Difference datasets are used
/// as stored; for activation datasets each listed layer after the first is
/// differenced against the previous listed layer.
pub fn dataset_differences(dataset: &Dataset, layers: &[u32]) -> Result<Vec<DiffRepresentation>> {
    let conditions = dataset.conditions();
    match dataset.manifest.kind {
        DataKind::Differences => {
            dataset.require(&conditions, layers)?;
            layers
                .iter()
                .map(|&l| {
                    let parts = conditions
                        .iter()
                        .map(|&c| Ok((c, dataset.load(c, l)?)))
                        .collect::<Result<Vec<_>>>()?;
                    DiffRepresentation::stack(&parts, l)
                })
                .collect()
        }
        DataKind::Activations => {
            let mut all = dataset.manifest.layers.clone();
            all.sort_unstable();
            all.dedup();
            let mut out = Vec::new();
            for &l in layers {
                let pos = all
                    .binary_search(&l)
                    .map_err(|_| Error::Coverage(vec![format!("layer {l}")]))?;
                if pos == 0 {
                    return Err(Error::Axis(format!(
                        "layer {l} has no earlier layer to difference against"
                    )));
                }
                let prev = all[pos - 1];
                dataset.require(&conditions, &[prev, l])?;
                let parts = conditions
                    .iter()
                    .map(|&c| {
                        let (a, b) = (dataset.load(c, l)?, dataset.load(c, prev)?);
                        if a.len() != b.len() {
                            return Err(Error::Size(format!(
                                "{c}: layers {prev} and {l} have {} and {} rows",
                                b.len(),
                                a.len()
                            )));
                        }
                        let coords = a.coords().iter().zip(b.coords()).map(|(x, y)| x - y).collect();
                        Ok((c, PointCloud::new(coords, a.len(), a.dim())?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(DiffRepresentation::stack(&parts, l)?);
            }
            Ok(out)
        }
    }
}
