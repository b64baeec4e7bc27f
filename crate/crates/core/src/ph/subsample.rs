use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cloud::PointCloud;
use crate::error::{Error, Result};

/// `k` distinct indices drawn uniformly from `0..n`, returned ascending.
pub fn subsample_indices(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k > n {
        return Err(Error::Size(format!(
            "cannot draw {k} points without replacement from {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = index::sample(&mut rng, n, k).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Uniform subsample without replacement; tags are carried along.
pub fn subsample(cloud: &PointCloud, k: usize, seed: u64) -> Result<PointCloud> {
    let idx = subsample_indices(cloud.len(), k, seed)?;
    cloud.select(&idx)
}
