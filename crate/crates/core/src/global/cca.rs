use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};

use super::pca::{orient, sorted_eigen, to_matrix};
use super::table::Standardizer;
use crate::error::{Error, Result};

/// Ridge added to a block covariance when it is numerically singular.
pub const CCA_RIDGE: f64 = 1e-8;
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcaResult {
    /// Canonical correlations, descending, in [0, 1].
    pub correlations: Vec<f64>,
    /// `x_loadings[j][k]`: correlation of X column `j` with the k-th X variate.
    pub x_loadings: Vec<Vec<f64>>,
    /// `y_loadings[j][k]`: correlation of Y column `j` with the k-th Y variate.
    pub y_loadings: Vec<Vec<f64>>,
    /// Set when a ridge was needed because a block was rank deficient.
    pub regularized: bool,
}

impl CcaResult {
    /// Loadings of each X column on the first canonical variable.
    pub fn first_loadings(&self) -> Vec<f64> {
        self.x_loadings.iter().map(|r| r[0]).collect()
    }
}

/// Inverse square root of a covariance block, ridged if near-singular.
fn inv_sqrt(s: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let (values, vectors) = sorted_eigen(s.clone());
    let max = values.first().copied().unwrap_or(0.0).max(0.0);
    let singular = values.iter().any(|&v| v <= RANK_TOL * max.max(1.0));
    let ridge = if singular { CCA_RIDGE } else { 0.0 };
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| 1.0 / (v.max(0.0) + ridge).sqrt()),
    ));
    (&vectors * d * vectors.transpose(), singular)
}

fn block(rows: &[Vec<f64>], label: &str) -> Result<DMatrix<f64>> {
    let p = rows.first().map_or(0, |r| r.len());
    if p == 0 {
        return Err(Error::Size(format!("{label} block has no columns")));
    }
    let names: Vec<String> = (0..p).map(|j| format!("{label}[{j}]")).collect();
    let s = Standardizer::fit(rows, &names)?;
    Ok(to_matrix(&s.transform(rows), p))
}

/// Canonical correlation analysis between two row-aligned blocks.
///
/// Columns are standardized first. With single columns on both sides this
/// reduces to the absolute Pearson correlation.
pub fn cca(x_rows: &[Vec<f64>], y_rows: &[Vec<f64>]) -> Result<CcaResult> {
    if x_rows.len() != y_rows.len() {
        return Err(Error::Size(format!(
            "blocks are not row-aligned: {} vs {}",
            x_rows.len(),
            y_rows.len()
        )));
    }
    if x_rows.len() < 3 {
        return Err(Error::Size(format!("CCA needs >= 3 rows, got {}", x_rows.len())));
    }
    let n = x_rows.len() as f64;
    let x = block(x_rows, "x")?;
    let y = block(y_rows, "y")?;
    let sxx = x.transpose() * &x / n;
    let syy = y.transpose() * &y / n;
    let sxy = x.transpose() * &y / n;
    let (wx, rx) = inv_sqrt(&sxx);
    let (wy, ry) = inv_sqrt(&syy);
    let m = &wx * &sxy * &wy;
    let svd = SVD::new(m, true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let r = svd.singular_values.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let (p, q) = (x.ncols(), y.ncols());
    let mut x_loadings = vec![vec![0.0; r]; p];
    let mut y_loadings = vec![vec![0.0; r]; q];
    let mut correlations = Vec::with_capacity(r);
    for (k, &src) in order.iter().enumerate() {
        correlations.push(svd.singular_values[src].clamp(0.0, 1.0));
        let a = &wx * u.column(src);
        let b = &wy * vt.row(src).transpose();
        let load = |s: &DMatrix<f64>, w: &nalgebra::DVector<f64>| -> Vec<f64> {
            let sw = s * w;
            let var = w.dot(&sw);
            if var > 0.0 {
                sw.iter().map(|v| v / var.sqrt()).collect()
            } else {
                vec![0.0; w.len()]
            }
        };
        let mut lx = load(&sxx, &a);
        let ly = load(&syy, &b);
        let before = lx.clone();
        orient(&mut lx);
        let flip = if lx != before { -1.0 } else { 1.0 };
        for j in 0..p {
            x_loadings[j][k] = lx[j];
        }
        for j in 0..q {
            y_loadings[j][k] = flip * ly[j];
        }
    }
    Ok(CcaResult {
        correlations,
        x_loadings,
        y_loadings,
        regularized: rx || ry,
    })
}
