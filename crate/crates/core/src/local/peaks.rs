use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Axes up to this length get an exact permutation p-value.
pub const EXACT_MAX_AXIS: usize = 12;
pub const DEFAULT_PERMUTATIONS: usize = 10_000;

/// Strict local maxima. Endpoints compare against their single neighbour;
/// an axis of length 1 has no peaks.
pub fn find_peaks(curve: &[f64]) -> Vec<usize> {
    let n = curve.len();
    (0..n)
        .filter(|&i| {
            let left = i == 0 || curve[i] > curve[i - 1];
            let right = i + 1 == n || curve[i] > curve[i + 1];
            n > 1 && left && right
        })
        .collect()
}

/// The `k` highest peaks, ties broken by lower index, returned ascending.
pub fn top_k_peaks(curve: &[f64], k: usize) -> Result<Vec<usize>> {
    let mut peaks = find_peaks(curve);
    if peaks.len() < k {
        return Err(Error::PeakCount {
            k,
            first: peaks.len(),
            second: peaks.len(),
        });
    }
    peaks.sort_by(|&a, &b| curve[b].total_cmp(&curve[a]).then(a.cmp(&b)));
    peaks.truncate(k);
    peaks.sort_unstable();
    Ok(peaks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakPrecision {
    pub k: usize,
    pub peaks_a: Vec<usize>,
    pub peaks_b: Vec<usize>,
    pub overlap: usize,
    pub precision: f64,
    pub p_value: f64,
    pub method: NullMethod,
    /// Subsets evaluated: all of them for the exact null.
    pub n_permutations: usize,
}

fn overlap(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|i| b.contains(i)).count()
}

/// Fraction of all `k`-subsets of `0..len` sharing at least `observed`
/// positions with `target`.
pub fn exact_p_value(len: usize, k: usize, target: &[usize], observed: usize) -> (f64, usize) {
    let mut hits = 0usize;
    let mut total = 0usize;
    let mut subset: Vec<usize> = (0..k).collect();
    if k > len {
        return (0.0, 0);
    }
    loop {
        total += 1;
        if overlap(&subset, target) >= observed {
            hits += 1;
        }
        // next combination in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| subset[i] < len - k + i) else {
            break;
        };
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
    (hits as f64 / total as f64, total)
}

/// `(1 + hits) / (1 + n)` over `n` uniform `k`-subsets.
pub fn monte_carlo_p_value(len: usize, k: usize, target: &[usize], observed: usize, n: usize, seed: u64) -> f64 {
    let mut rng = seed::rng(seed, &[0x9b]);
    let hits = (0..n)
        .filter(|_| {
            let s = sample(&mut rng, len, k);
            s.iter().filter(|i| target.contains(i)).count() >= observed
        })
        .count();
    (1 + hits) as f64 / (1 + n) as f64
}

/// Precision@k between the top-k peaks of two curves on a shared axis, with
/// a permutation p-value against uniformly random k-subsets of the axis.
pub fn peak_precision_at_k(
    curve_a: &[f64],
    curve_b: &[f64],
    k: usize,
    n_permutations: usize,
    seed: u64,
) -> Result<PeakPrecision> {
    if curve_a.len() != curve_b.len() {
        return Err(Error::Size(format!(
            "curves differ in length: {} vs {}",
            curve_a.len(),
            curve_b.len()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    let (na, nb) = (find_peaks(curve_a).len(), find_peaks(curve_b).len());
    if na < k || nb < k {
        return Err(Error::PeakCount {
            k,
            first: na,
            second: nb,
        });
    }
    let peaks_a = top_k_peaks(curve_a, k)?;
    let peaks_b = top_k_peaks(curve_b, k)?;
    let observed = overlap(&peaks_a, &peaks_b);
    let len = curve_a.len();
    let (p_value, method, n) = if len <= EXACT_MAX_AXIS {
        let (p, total) = exact_p_value(len, k, &peaks_b, observed);
        (p, NullMethod::Exact, total)
    } else {
        if n_permutations == 0 {
            return Err(Error::InvalidInput("need at least one permutation".into()));
        }
        (
            monte_carlo_p_value(len, k, &peaks_b, observed, n_permutations, seed),
            NullMethod::MonteCarlo,
            n_permutations,
        )
    };
    Ok(PeakPrecision {
        k,
        precision: observed as f64 / k as f64,
        overlap: observed,
        peaks_a,
        peaks_b,
        p_value,
        method,
        n_permutations: n,
    })
}
