//! Synthetic point clouds with known topology.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ph::{Condition, PointCloud};
use crate::seed;

/// Two disjoint unit circles centred 5 apart, with Gaussian radial noise.
///
/// The first circle gets `n / 2` points, the second the rest. Angles are evenly
/// spaced with a random phase per circle, so with zero noise each circle is a
/// regular polygon.
pub fn gen_two_circles(n: usize, noise_sigma: f64, seed: u64) -> Result<PointCloud> {
    if n < 8 {
        return Err(Error::Size(format!("two circles need n >= 8, got {n}")));
    }
    if !(noise_sigma >= 0.0) {
        return Err(Error::Domain(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let mut rng = seed::rng(seed, &[0x7c]);
    let noise = Normal::new(0.0, noise_sigma).expect("sigma checked");
    let mut rows = Vec::with_capacity(n);
    for (count, cx) in [(n / 2, -2.5), (n - n / 2, 2.5)] {
        let phase = rng.random::<f64>() * 2.0 * PI;
        for j in 0..count {
            let theta = phase + 2.0 * PI * j as f64 / count as f64;
            let r = 1.0 + noise.sample(&mut rng);
            rows.push([cx + r * theta.cos(), r * theta.sin()]);
        }
    }
    PointCloud::from_rows(&rows)
}

/// Vertices of a regular `n`-gon of circumradius `radius`, centred at the origin.
pub fn gen_regular_ngon(n: usize, radius: f64) -> Result<PointCloud> {
    if n < 3 {
        return Err(Error::Size(format!("a polygon needs n >= 3, got {n}")));
    }
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n as f64;
            [radius * theta.cos(), radius * theta.sin()]
        })
        .collect();
    PointCloud::from_rows(&rows)
}

/// Parameters of one Gaussian-mixture family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub clusters: usize,
    pub spread: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    pub n_samples: usize,
    pub dim: usize,
    pub clean: FamilyParams,
    pub poisoned: FamilyParams,
    /// Standard deviation of the shared cluster centres.
    pub center_scale: f64,
}

pub const DEFAULT_SURROGATE_DIM: usize = 16;
pub const DEFAULT_SPREAD_CLEAN: f64 = 0.5;
pub const DEFAULT_SPREAD_POISONED: f64 = 1.0;

impl SurrogateConfig {
    /// Clean draws from 8 tight clusters, poisoned from 3 wider ones.
    pub fn new(n_samples: usize, dim: usize, spread_clean: f64, spread_poisoned: f64) -> Self {
        SurrogateConfig {
            n_samples,
            dim,
            clean: FamilyParams {
                clusters: 8,
                spread: spread_clean,
            },
            poisoned: FamilyParams {
                clusters: 3,
                spread: spread_poisoned,
            },
            center_scale: 3.0,
        }
    }

    /// Both conditions drawn from the same mixture.
    pub fn identical(n_samples: usize, dim: usize, family: FamilyParams) -> Self {
        SurrogateConfig {
            n_samples,
            dim,
            clean: family,
            poisoned: family,
            center_scale: 3.0,
        }
    }
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig::new(
            2048,
            DEFAULT_SURROGATE_DIM,
            DEFAULT_SPREAD_CLEAN,
            DEFAULT_SPREAD_POISONED,
        )
    }
}

fn mixture(rng: &mut impl Rng, centers: &[Vec<f64>], family: FamilyParams, n: usize, dim: usize) -> Vec<f64> {
    let mut coords = Vec::with_capacity(n * dim);
    for i in 0..n {
        let c = &centers[i % family.clusters];
        for x in c.iter() {
            let z: f64 = StandardNormal.sample(rng);
            coords.push(x + family.spread * z);
        }
    }
    coords
}

/// Clean and poisoned clouds from two Gaussian mixtures sharing cluster centres.
///
/// With the default parameters the clean family is many compact clusters and
/// the poisoned family a few diffuse ones, so clean barcodes show earlier
/// merges and more, earlier-born loops.
pub fn gen_condition_surrogate_with(config: &SurrogateConfig, seed: u64) -> Result<(PointCloud, PointCloud)> {
    let SurrogateConfig {
        n_samples,
        dim,
        clean,
        poisoned,
        center_scale,
    } = *config;
    for f in [clean, poisoned] {
        if !(f.spread > 0.0) || f.clusters == 0 {
            return Err(Error::Domain(format!(
                "spreads must be > 0 and clusters >= 1, got {f:?}"
            )));
        }
    }
    let mut center_rng = seed::rng(seed, &[0xce]);
    let centers: Vec<Vec<f64>> = (0..clean.clusters.max(poisoned.clusters))
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut center_rng);
                    center_scale * z
                })
                .collect::<Vec<f64>>()
        })
        .collect();
    let a = mixture(&mut seed::rng(seed, &[0xc1]), &centers, clean, n_samples, dim);
    let b = mixture(&mut seed::rng(seed, &[0xc2]), &centers, poisoned, n_samples, dim);
    Ok((
        PointCloud::new(a, n_samples, dim)?.with_uniform_tag(Some(Condition::Clean), None),
        PointCloud::new(b, n_samples, dim)?.with_uniform_tag(Some(Condition::Poisoned), None),
    ))
}

pub fn gen_condition_surrogate(
    n_samples: usize,
    dim: usize,
    spread_clean: f64,
    spread_poisoned: f64,
    seed: u64,
) -> Result<(PointCloud, PointCloud)> {
    gen_condition_surrogate_with(
        &SurrogateConfig::new(n_samples, dim, spread_clean, spread_poisoned),
        seed,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStackConfig {
    pub n_samples: usize,
    pub n_layers: usize,
    pub dim: usize,
    /// Layers `f` whose pair `(f, f + 1)` carries an injected loop in the
    /// poisoned condition.
    pub loop_layers: Vec<usize>,
    pub ring_noise: f64,
}

/// Per-layer activation matrices (`n_samples x dim`) for both conditions.
#[derive(Debug, Clone)]
pub struct LayerStack {
    pub clean: Vec<PointCloud>,
    pub poisoned: Vec<PointCloud>,
}

/// Layer stacks of i.i.d. standard normal activations with optional loops.
///
/// At a flagged layer `f` both conditions use `sqrt(2) cos(theta)` in layer `f`.
/// In layer `f + 1` poisoned samples use `sqrt(2) sin(theta)` with the same
/// angles, so neuron pairs fall on a ring; clean samples use independent
/// angles, which gives identical marginals without the loop.
pub fn gen_layer_stack(config: &LayerStackConfig, seed: u64) -> Result<LayerStack> {
    let LayerStackConfig {
        n_samples,
        n_layers,
        dim,
        ref loop_layers,
        ring_noise,
    } = *config;
    if n_samples == 0 || dim < 2 || n_layers < 2 {
        return Err(Error::Size(format!(
            "layer stack needs samples >= 1, dim >= 2, layers >= 2; got {n_samples}, {dim}, {n_layers}"
        )));
    }
    let mut flagged = loop_layers.clone();
    flagged.sort_unstable();
    for w in flagged.windows(2) {
        if w[1] <= w[0] + 1 {
            return Err(Error::InvalidInput(format!(
                "loop layers {} and {} overlap",
                w[0], w[1]
            )));
        }
    }
    if let Some(&f) = flagged.last() {
        if f + 1 >= n_layers {
            return Err(Error::InvalidInput(format!(
                "loop layer {f} needs a following layer (have {n_layers})"
            )));
        }
    }
    let noise = Normal::new(0.0, ring_noise.max(0.0)).expect("noise >= 0");
    let mut stacks = Vec::with_capacity(2);
    for (c_idx, condition) in [Condition::Clean, Condition::Poisoned].into_iter().enumerate() {
        let mut layers: Vec<Vec<f64>> = vec![Vec::with_capacity(n_samples * dim); n_layers];
        for s in 0..n_samples {
            let mut rng = seed::rng(seed, &[0x15, c_idx as u64, s as u64]);
            let mut l = 0;
            while l < n_layers {
                if flagged.binary_search(&l).is_ok() {
                    for _ in 0..dim {
                        let theta = rng.random::<f64>() * 2.0 * PI;
                        let other = if condition == Condition::Poisoned {
                            theta
                        } else {
                            rng.random::<f64>() * 2.0 * PI
                        };
                        layers[l].push(SQRT_2 * theta.cos() + noise.sample(&mut rng));
                        layers[l + 1].push(SQRT_2 * other.sin() + noise.sample(&mut rng));
                    }
                    l += 2;
                } else {
                    for _ in 0..dim {
                        layers[l].push(StandardNormal.sample(&mut rng));
                    }
                    l += 1;
                }
            }
        }
        let clouds = layers
            .into_iter()
            .enumerate()
            .map(|(l, coords)| {
                PointCloud::new(coords, n_samples, dim).map(|c| c.with_uniform_tag(Some(condition), Some(l as u32)))
            })
            .collect::<Result<Vec<_>>>()?;
        stacks.push(clouds);
    }
    let poisoned = stacks.pop().unwrap();
    let clean = stacks.pop().unwrap();
    Ok(LayerStack { clean, poisoned })
}
