use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::table::Standardizer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub feature_names: Vec<String>,
    /// `loadings[c][j]`: weight of feature `j` in component `c`.
    pub loadings: Vec<Vec<f64>>,
    /// `scores[i][c]`: row `i` projected on component `c`.
    pub scores: Vec<Vec<f64>>,
    pub explained_variance_ratio: Vec<f64>,
    /// Every eigenvalue of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    pub standardizer: Standardizer,
}

/// Row-major rows into an `n x p` matrix.
pub(crate) fn to_matrix(rows: &[Vec<f64>], p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j])
}

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
pub(crate) fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |i, c| {
        eig.eigenvectors[(i, order[c])]
    });
    (values, vectors)
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
pub(crate) fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// PCA of standardized features (zero mean, unit population variance).
pub fn pca(rows: &[Vec<f64>], feature_names: &[String], n_components: usize) -> Result<PcaResult> {
    let p = feature_names.len();
    if rows.len() < 2 {
        return Err(Error::Size(format!("PCA needs >= 2 rows, got {}", rows.len())));
    }
    if n_components == 0 || n_components > p {
        return Err(Error::InvalidInput(format!(
            "n_components must lie in 1..={p}, got {n_components}"
        )));
    }
    let standardizer = Standardizer::fit(rows, feature_names).map_err(|e| Error::Domain(format!("PCA input: {e}")))?;
    let z = to_matrix(&standardizer.transform(rows), p);
    let cov = z.transpose() * &z / rows.len() as f64;
    let (values, vectors) = sorted_eigen(cov);
    let values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
    let total: f64 = values.iter().sum();

    let mut loadings = Vec::with_capacity(n_components);
    for c in 0..n_components {
        let mut v: Vec<f64> = vectors.column(c).iter().copied().collect();
        orient(&mut v);
        loadings.push(v);
    }
    let scores = (0..rows.len())
        .map(|i| {
            loadings
                .iter()
                .map(|l| l.iter().enumerate().map(|(j, w)| w * z[(i, j)]).sum())
                .collect()
        })
        .collect();
    Ok(PcaResult {
        feature_names: feature_names.to_vec(),
        loadings,
        scores,
        explained_variance_ratio: values[..n_components].iter().map(|v| v / total).collect(),
        eigenvalues: values,
        standardizer,
    })
}
