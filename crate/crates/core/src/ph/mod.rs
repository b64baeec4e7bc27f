//! Vietoris-Rips persistence of point clouds and distance matrices.

mod barcode;
mod cloud;
mod distance;
mod rips;
mod subsample;
pub mod union_find;

pub use barcode::{Barcode, Interval};
pub use cloud::{Condition, PointCloud, PointTag};
pub use distance::{distance_matrix, DistanceMatrix, Metric};
pub use rips::{rips_persistence, Threshold};
pub use subsample::{subsample, subsample_indices};

use crate::error::Result;

/// Distance matrix plus barcode in one call.
pub fn cloud_persistence(cloud: &PointCloud, metric: Metric, max_dim: usize, threshold: Threshold) -> Result<Barcode> {
    let dist = distance_matrix(cloud, metric)?;
    rips_persistence(&dist, max_dim, threshold)
}
