use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ph::{Condition, PointCloud};
use crate::seed;
use crate::stats::{mean, population_std};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Original,
    Normalized,
    NormalizedPermuted,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Original, Variant::Normalized, Variant::NormalizedPermuted];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::Normalized => "normalized",
            Variant::NormalizedPermuted => "normalized_permuted",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variant {s:?}")))
    }
}

/// One sample's neurons as points `(activation in layer a, activation in layer b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerPairEmbedding {
    pub points: Vec<[f64; 2]>,
    pub condition: Option<Condition>,
    pub variant: Variant,
    pub sample: Option<usize>,
    pub layers: Option<(u32, u32)>,
}

impl LayerPairEmbedding {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_cloud(&self) -> Result<PointCloud> {
        PointCloud::from_rows(&self.points)
    }

    pub fn with_context(mut self, condition: Condition, sample: usize, layers: (u32, u32)) -> Self {
        self.condition = Some(condition);
        self.sample = Some(sample);
        self.layers = Some(layers);
        self
    }
}

/// Point `i` is `(act_a[i], act_b[i])`.
pub fn pair_embedding(act_a: &[f64], act_b: &[f64]) -> Result<LayerPairEmbedding> {
    if act_a.len() != act_b.len() {
        return Err(Error::Size(format!(
            "activation vectors differ in length: {} vs {}",
            act_a.len(),
            act_b.len()
        )));
    }
    if act_a.len() < 2 {
        return Err(Error::Size(format!("need D >= 2 neurons, got {}", act_a.len())));
    }
    Ok(LayerPairEmbedding {
        points: act_a.iter().zip(act_b).map(|(&a, &b)| [a, b]).collect(),
        condition: None,
        variant: Variant::Original,
        sample: None,
        layers: None,
    })
}

/// Zero mean, unit population variance across the vector's entries.
pub fn normalize_vector(v: &[f64]) -> Result<Vec<f64>> {
    if v.len() < 2 {
        return Err(Error::Size(format!("need D >= 2 entries, got {}", v.len())));
    }
    let m = mean(v);
    let s = population_std(v);
    if !(s > 0.0) {
        return Err(Error::Degenerate(
            "cannot normalize a constant activation vector".into(),
        ));
    }
    Ok(v.iter().map(|x| (x - m) / s).collect())
}

/// Embedding of the two normalized vectors.
pub fn normalized_embedding(act_a: &[f64], act_b: &[f64]) -> Result<LayerPairEmbedding> {
    let mut e = pair_embedding(&normalize_vector(act_a)?, &normalize_vector(act_b)?)?;
    e.variant = Variant::Normalized;
    Ok(e)
}

/// Re-indexes the second coordinate by a uniform permutation drawn from `seed`.
pub fn permute_control(embedding: &LayerPairEmbedding, seed: u64) -> LayerPairEmbedding {
    let mut order: Vec<usize> = (0..embedding.points.len()).collect();
    order.shuffle(&mut seed::rng(seed, &[0x9e]));
    let points = embedding
        .points
        .iter()
        .zip(&order)
        .map(|(p, &j)| [p[0], embedding.points[j][1]])
        .collect();
    LayerPairEmbedding {
        points,
        variant: Variant::NormalizedPermuted,
        ..embedding.clone()
    }
}
