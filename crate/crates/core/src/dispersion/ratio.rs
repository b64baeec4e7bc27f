use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ph::PointCloud;

pub const DEFAULT_NEIGHBORS: usize = 30;
pub const DISPERSION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    /// Sum of the non-leading eigenvalues over the leading one.
    pub ratio: f64,
    /// Number of positive eigenvalues of the neighbourhood covariance.
    pub rank: usize,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `k` nearest other rows of `i`, ties by index.
fn neighbors(cloud: &PointCloud, i: usize, k: usize) -> Vec<usize> {
    let p = cloud.point(i);
    let mut d: Vec<(f64, usize)> = (0..cloud.len())
        .filter(|&j| j != i)
        .map(|j| (squared_distance(p, cloud.point(j)), j))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    d.select_nth_unstable_by(k - 1, cmp);
    d.truncate(k);
    d.sort_by(cmp);
    d.into_iter().map(|(_, j)| j).collect()
}

/// Eigenvalues of the centred neighbourhood covariance, descending. Uses the
/// `k x k` Gram matrix, which shares the nonzero spectrum.
fn neighborhood_spectrum(cloud: &PointCloud, idx: &[usize]) -> Vec<f64> {
    let (k, d) = (idx.len(), cloud.dim());
    let mut centroid = vec![0.0; d];
    for &j in idx {
        for (c, x) in centroid.iter_mut().zip(cloud.point(j)) {
            *c += x;
        }
    }
    centroid.iter_mut().for_each(|c| *c /= k as f64);
    let x = DMatrix::from_fn(k, d, |r, c| cloud.point(idx[r])[c] - centroid[c]);
    let gram = &x * x.transpose() / (k as f64 - 1.0);
    let mut ev: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Dispersion of each row's `k`-nearest-neighbour set (the row itself excluded).
pub fn local_dispersion_ratio(cloud: &PointCloud, k: usize) -> Result<Vec<Dispersion>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be >= 2, got {k}")));
    }
    if cloud.len() <= k {
        return Err(Error::Size(format!("need more than k = {k} rows, got {}", cloud.len())));
    }
    Ok((0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let ev = neighborhood_spectrum(cloud, &neighbors(cloud, i, k));
            let lead = ev[0].max(0.0);
            // eigenvalues below roundoff of the leading one count as zero
            let floor = lead * 1e-12;
            let positive: Vec<f64> = ev.into_iter().filter(|&l| l > floor).collect();
            let rest: f64 = positive.iter().skip(1).sum();
            Dispersion {
                ratio: rest / (lead + DISPERSION_EPS),
                rank: positive.len(),
            }
        })
        .collect())
}
