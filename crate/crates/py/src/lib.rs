//! Python bindings: barcodes, summaries, the global pipeline on clouds, and
//! the statistics kernels. Clouds are passed as lists of rows.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use topolens::data;
use topolens::dispersion;
use topolens::features::{self, SummaryConfig};
use topolens::global::{self, GlobalConfig};
use topolens::local;
use topolens::ph::{self, Condition, Metric, PointCloud, Threshold};

fn err(e: topolens::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cloud(points: Vec<Vec<f64>>) -> PyResult<PointCloud> {
    PointCloud::from_rows(&points).map_err(err)
}

type Rows = Vec<Vec<f64>>;

fn rows(c: &PointCloud) -> Vec<Vec<f64>> {
    c.rows().map(|r| r.to_vec()).collect()
}

/// Persistence barcode of a point cloud.
#[pyclass(name = "Barcode", frozen)]
struct PyBarcode {
    inner: ph::Barcode,
}

#[pymethods]
impl PyBarcode {
    #[getter]
    fn n_points(&self) -> usize {
        self.inner.n_points
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.inner.threshold
    }

    /// `(dim, birth, death, truncated)` tuples; infinite deaths are `inf`.
    #[getter]
    fn intervals(&self) -> Vec<(u8, f64, f64, bool)> {
        self.inner
            .intervals
            .iter()
            .map(|i| (i.dim, i.birth, i.death, i.truncated))
            .collect()
    }

    /// The 41 summary statistics, in the fixed feature order.
    #[pyo3(signature = (count_infinite_h0 = false))]
    fn summary(&self, count_infinite_h0: bool) -> Vec<(String, f64)> {
        let s = features::summarize(&self.inner, SummaryConfig { count_infinite_h0 });
        features::feature_names().iter().cloned().zip(s.values).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.intervals.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Barcode(n_points={}, intervals={}, threshold={})",
            self.inner.n_points,
            self.inner.intervals.len(),
            self.inner.threshold
        )
    }
}

/// Vietoris-Rips barcode up to dimension `max_dim` (0 or 1).
#[pyfunction]
#[pyo3(signature = (points, metric = "euclidean", max_dim = 1, threshold = None))]
fn barcode(points: Vec<Vec<f64>>, metric: &str, max_dim: usize, threshold: Option<f64>) -> PyResult<PyBarcode> {
    let metric: Metric = metric.parse().map_err(err)?;
    let threshold = threshold.map_or(Threshold::Auto, Threshold::Value);
    let inner = ph::cloud_persistence(&cloud(points)?, metric, max_dim, threshold).map_err(err)?;
    Ok(PyBarcode { inner })
}

#[pyfunction]
fn feature_names() -> Vec<String> {
    features::feature_names().to_vec()
}

#[pyfunction]
fn persistent_entropy(lengths: Vec<f64>) -> PyResult<f64> {
    features::persistent_entropy(&lengths).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n = 50, noise_sigma = 0.05, seed = 0))]
fn gen_two_circles(n: usize, noise_sigma: f64, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(&data::gen_two_circles(n, noise_sigma, seed).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (n, radius = 1.0))]
fn gen_regular_ngon(n: usize, radius: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(&data::gen_regular_ngon(n, radius).map_err(err)?))
}

/// Clean and poisoned surrogate clouds.
#[pyfunction]
#[pyo3(signature = (n_samples = 2048, dim = 16, spread_clean = 0.5, spread_poisoned = 1.0, seed = 0))]
fn gen_condition_surrogate(
    n_samples: usize,
    dim: usize,
    spread_clean: f64,
    spread_poisoned: f64,
    seed: u64,
) -> PyResult<(Rows, Rows)> {
    let (a, b) = data::gen_condition_surrogate(n_samples, dim, spread_clean, spread_poisoned, seed).map_err(err)?;
    Ok((rows(&a), rows(&b)))
}

/// Global pipeline on one layer's clean and poisoned clouds. Returns the
/// report as a JSON string.
#[pyfunction]
#[pyo3(signature = (clean, poisoned, n_subsamples = 32, subsample_size = 256, seed = 0, layer = 0))]
fn global_report(
    py: Python<'_>,
    clean: Vec<Vec<f64>>,
    poisoned: Vec<Vec<f64>>,
    n_subsamples: usize,
    subsample_size: usize,
    seed: u64,
    layer: u32,
) -> PyResult<String> {
    let (a, b) = (cloud(clean)?, cloud(poisoned)?);
    let config = GlobalConfig {
        n_subsamples,
        subsample_size,
        seed,
        ..GlobalConfig::default()
    };
    let (report, _) = py.detach(|| global::run_clouds(&a, &b, layer, &config)).map_err(err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Welch's t-test: `(t, df, p)`.
#[pyfunction]
fn welch_t(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    let r = dispersion::welch_t(&a, &b).map_err(err)?;
    Ok((r.statistic, r.df, r.p_value))
}

#[pyfunction]
fn bh_fdr(p_values: Vec<f64>) -> PyResult<Vec<f64>> {
    dispersion::bh_fdr(&p_values).map_err(err)
}

/// Per-point neighbourhood dispersion ratios.
#[pyfunction]
#[pyo3(signature = (points, k = 30))]
fn local_dispersion_ratio(points: Vec<Vec<f64>>, k: usize) -> PyResult<Vec<f64>> {
    let d = dispersion::local_dispersion_ratio(&cloud(points)?, k).map_err(err)?;
    Ok(d.into_iter().map(|x| x.ratio).collect())
}

/// Precision at k between the top peaks of two curves: `(precision, p_value)`.
#[pyfunction]
#[pyo3(signature = (a, b, k, n_permutations = 10_000, seed = 0))]
fn peak_precision_at_k(a: Vec<f64>, b: Vec<f64>, k: usize, n_permutations: usize, seed: u64) -> PyResult<(f64, f64)> {
    let r = local::peak_precision_at_k(&a, &b, k, n_permutations, seed).map_err(err)?;
    Ok((r.precision, r.p_value))
}

#[pyfunction]
fn condition_labels() -> Vec<&'static str> {
    Condition::ALL.iter().map(|c| c.as_str()).collect()
}

#[pymodule]
fn topolens_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBarcode>()?;
    m.add_function(wrap_pyfunction!(barcode, m)?)?;
    m.add_function(wrap_pyfunction!(feature_names, m)?)?;
    m.add_function(wrap_pyfunction!(persistent_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(gen_two_circles, m)?)?;
    m.add_function(wrap_pyfunction!(gen_regular_ngon, m)?)?;
    m.add_function(wrap_pyfunction!(gen_condition_surrogate, m)?)?;
    m.add_function(wrap_pyfunction!(global_report, m)?)?;
    m.add_function(wrap_pyfunction!(welch_t, m)?)?;
    m.add_function(wrap_pyfunction!(bh_fdr, m)?)?;
    m.add_function(wrap_pyfunction!(local_dispersion_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(peak_precision_at_k, m)?)?;
    m.add_function(wrap_pyfunction!(condition_labels, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
