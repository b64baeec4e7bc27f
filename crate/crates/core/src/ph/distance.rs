use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cloud::PointCloud;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    Cosine,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::InvalidInput(format!("unknown metric {other:?}"))),
        }
    }
}

/// Dense symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
    metric: Metric,
}

impl DistanceMatrix {
    /// Validates a full row-major `n x n` matrix.
    pub fn from_full(n: usize, data: Vec<f64>, metric: Metric) -> Result<Self> {
        if n == 0 {
            return Err(Error::Size("distance matrix needs at least one point".into()));
        }
        if data.len() != n * n {
            return Err(Error::Size(format!(
                "distance buffer has {} entries, expected {}",
                data.len(),
                n * n
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::Domain(format!("nonzero diagonal entry at {i}")));
            }
            for j in i + 1..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Domain(format!(
                        "entry ({i}, {j}) = {v} is not a finite nonnegative distance"
                    )));
                }
                if v != data[j * n + i] {
                    return Err(Error::Domain(format!("entry ({i}, {j}) is not symmetric")));
                }
            }
        }
        Ok(DistanceMatrix { n, data, metric })
    }

    /// Builds the matrix from lower-triangular entries `d(1,0), d(2,0), d(2,1), ...`.
    pub fn from_lower_triangle(n: usize, lower: &[f64], metric: Metric) -> Result<Self> {
        if lower.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Size(format!(
                "lower triangle has {} entries, expected {}",
                lower.len(),
                n * n.saturating_sub(1) / 2
            )));
        }
        let mut data = vec![0.0; n * n];
        let mut it = lower.iter();
        for i in 1..n {
            for j in 0..i {
                let v = *it.next().expect("length checked");
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        DistanceMatrix::from_full(n, data, metric)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Minimum over points of the largest distance to any other point.
    pub fn enclosing_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().copied().fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Pairwise distances of a point cloud. Each pair is computed once and mirrored.
pub fn distance_matrix(cloud: &PointCloud, metric: Metric) -> Result<DistanceMatrix> {
    let n = cloud.len();
    let mut data = vec![0.0; n * n];
    match metric {
        Metric::Euclidean => {
            for i in 0..n {
                let a = cloud.point(i);
                for j in i + 1..n {
                    let v = euclidean(a, cloud.point(j));
                    data[i * n + j] = v;
                    data[j * n + i] = v;
                }
            }
        }
        Metric::Cosine => {
            let norms: Vec<f64> = cloud
                .rows()
                .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect();
            if let Some(i) = norms.iter().position(|&v| v == 0.0) {
                return Err(Error::ZeroNorm(i));
            }
            for i in 0..n {
                let a = cloud.point(i);
                for j in i + 1..n {
                    let dot: f64 = a.iter().zip(cloud.point(j)).map(|(x, y)| x * y).sum();
                    // rounding can push the cosine slightly outside [-1, 1]
                    let v = (1.0 - dot / (norms[i] * norms[j])).max(0.0);
                    data[i * n + j] = v;
                    data[j * n + i] = v;
                }
            }
        }
    }
    Ok(DistanceMatrix { n, data, metric })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagorean_pair() {
        let cloud = PointCloud::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let d = distance_matrix(&cloud, Metric::Euclidean).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(1, 1), 0.0);
    }

    #[test]
    fn cosine_of_orthogonal_vectors_is_one() {
        let cloud = PointCloud::from_rows(&[[1.0, 0.0], [0.0, 1.0], [2.0, 0.0]]).unwrap();
        let d = distance_matrix(&cloud, Metric::Cosine).unwrap();
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(0, 2), 0.0);
    }

    #[test]
    fn cosine_rejects_zero_norm_point() {
        let cloud = PointCloud::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        match distance_matrix(&cloud, Metric::Cosine) {
            Err(Error::ZeroNorm(1)) => {}
            other => panic!("expected zero-norm error, got {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_asymmetry() {
        let err = DistanceMatrix::from_full(2, vec![0.0, 1.0, 2.0, 0.0], Metric::Euclidean);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn enclosing_radius_of_collinear_points() {
        let cloud = PointCloud::from_rows(&[[0.0], [1.0], [3.0]]).unwrap();
        let d = distance_matrix(&cloud, Metric::Euclidean).unwrap();
        assert_eq!(d.enclosing_radius(), 2.0);
    }
}
