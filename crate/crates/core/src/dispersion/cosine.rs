use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{welch_t, WelchResult};
use crate::error::{Error, Result};
use crate::ph::PointCloud;
use crate::seed;

pub const DEFAULT_BOOTSTRAP_SUBSAMPLE: usize = 5000;
pub const DEFAULT_BOOTSTRAP_ITERATIONS: usize = 3;

fn unit_rows(cloud: &PointCloud, rows: &[usize]) -> Result<Vec<Vec<f64>>> {
    let zero: Vec<usize> = rows
        .iter()
        .copied()
        .filter(|&i| cloud.point(i).iter().all(|&x| x == 0.0))
        .collect();
    if !zero.is_empty() {
        return Err(Error::ZeroNormRows(zero));
    }
    Ok(rows
        .iter()
        .map(|&i| {
            let p = cloud.point(i);
            let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            p.iter().map(|x| x / n).collect()
        })
        .collect())
}

/// Mean of `1 - cos(u_i, u_j)` over all pairs `i < j`, from the identity
/// `sum_{i<j} u_i . u_j = (|sum u|^2 - sum |u|^2) / 2` on unit rows.
pub fn mean_pairwise_cosine_distance(cloud: &PointCloud, rows: &[usize]) -> Result<f64> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::Size(format!("need >= 2 rows for pairwise distances, got {n}")));
    }
    let units = unit_rows(cloud, rows)?;
    let mut total = vec![0.0; cloud.dim()];
    let mut self_dots = 0.0;
    for u in &units {
        for (t, x) in total.iter_mut().zip(u) {
            *t += x;
        }
        self_dots += u.iter().map(|x| x * x).sum::<f64>();
    }
    let cross = (total.iter().map(|x| x * x).sum::<f64>() - self_dots) / 2.0;
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(1.0 - cross / pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineBootstrap {
    pub subsample: usize,
    /// The requested subsample exceeded a group and was reduced.
    pub clamped: bool,
    pub iterations: usize,
    pub means_a: Vec<f64>,
    pub means_b: Vec<f64>,
    /// Absent when a group's distribution is constant or too short to test.
    pub welch: Option<WelchResult>,
}

/// Per iteration, the mean pairwise cosine distance of a fresh subsample
/// (without replacement) of each group; the two series are then compared.
pub fn cosine_bootstrap(
    cloud: &PointCloud,
    group_a: &[usize],
    group_b: &[usize],
    subsample: usize,
    iterations: usize,
    seed: u64,
) -> Result<CosineBootstrap> {
    if iterations == 0 {
        return Err(Error::InvalidInput("need at least one bootstrap iteration".into()));
    }
    let size = subsample.min(group_a.len()).min(group_b.len());
    if size < 2 {
        return Err(Error::Size(format!(
            "groups of {} and {} rows are too small to subsample",
            group_a.len(),
            group_b.len()
        )));
    }
    let mut zero: Vec<usize> = group_a
        .iter()
        .chain(group_b)
        .copied()
        .filter(|&i| cloud.point(i).iter().all(|&x| x == 0.0))
        .collect();
    if !zero.is_empty() {
        zero.sort_unstable();
        zero.dedup();
        return Err(Error::ZeroNormRows(zero));
    }
    let draw = |group: &[usize], tag: u64, it: usize| -> Result<f64> {
        let mut rng = seed::rng(seed, &[0xb0, tag, it as u64]);
        let rows: Vec<usize> = sample(&mut rng, group.len(), size)
            .into_iter()
            .map(|i| group[i])
            .collect();
        mean_pairwise_cosine_distance(cloud, &rows)
    };
    let means_a = (0..iterations)
        .into_par_iter()
        .map(|it| draw(group_a, 0, it))
        .collect::<Result<Vec<_>>>()?;
    let means_b = (0..iterations)
        .into_par_iter()
        .map(|it| draw(group_b, 1, it))
        .collect::<Result<Vec<_>>>()?;
    Ok(CosineBootstrap {
        subsample: size,
        clamped: size < subsample,
        iterations,
        welch: welch_t(&means_a, &means_b).ok(),
        means_a,
        means_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_orthogonal_rows() {
        let same = PointCloud::from_rows(&vec![vec![1.0, 2.0, 3.0]; 5]).unwrap();
        let d = mean_pairwise_cosine_distance(&same, &[0, 1, 2, 3, 4]).unwrap();
        assert!(d.abs() < 1e-12);
        let eye: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        let eye = PointCloud::from_rows(&eye).unwrap();
        assert_eq!(mean_pairwise_cosine_distance(&eye, &[0, 1, 2, 3]).unwrap(), 1.0);
    }

    #[test]
    fn identity_matches_explicit_pairs() {
        let rows: Vec<Vec<f64>> = (0..9)
            .map(|i| vec![(i as f64).sin(), (i as f64 * 0.7).cos(), 0.3 + i as f64])
            .collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let idx: Vec<usize> = (0..9).collect();
        let mut explicit = 0.0;
        for i in 0..9 {
            for j in i + 1..9 {
                let (a, b) = (&rows[i], &rows[j]);
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                explicit += 1.0 - dot / (na * nb);
            }
        }
        explicit /= 36.0;
        assert!((mean_pairwise_cosine_distance(&cloud, &idx).unwrap() - explicit).abs() < 1e-12);
    }

    #[test]
    fn zero_rows_are_named() {
        let cloud = PointCloud::from_rows(&[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let err = cosine_bootstrap(&cloud, &[0, 1], &[2, 3], 2, 3, 0).unwrap_err();
        assert!(matches!(err, Error::ZeroNormRows(ref v) if v == &vec![1, 3]));
    }

    #[test]
    fn oversized_subsample_is_clamped() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0 + i as f64, 2.0, (i * i) as f64]).collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let a: Vec<usize> = (0..5).collect();
        let b: Vec<usize> = (5..10).collect();
        let r = cosine_bootstrap(&cloud, &a, &b, 5000, 3, 1).unwrap();
        assert!(r.clamped);
        assert_eq!(r.subsample, 5);
        assert_eq!(r.means_a.len(), 3);
    }
}
