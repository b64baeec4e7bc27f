//! Vietoris-Rips persistence in dimensions 0 and 1.
//!
//! Dimension 0 is read off Kruskal's algorithm: every edge that merges two
//! components kills a 0-bar at its length. Dimension 1 is computed as
//! persistent cohomology: edge columns of the coboundary matrix are reduced in
//! reverse filtration order, with edges already paired in dimension 0 cleared
//! up front and zero-persistence (emergent) pairs detected without building
//! the full coboundary. Reduced columns are never stored; only the list of
//! edges added into each column is kept, and coboundaries are regenerated on
//! demand.
//!
//! Simplices are ordered by filtration value, then lexicographically by their
//! sorted vertex list. Filtration values are exact copies of input distances,
//! so ties are exact.

use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::BinaryHeap;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::barcode::{Barcode, Interval};
use super::distance::DistanceMatrix;
use super::union_find::UnionFind;
use crate::error::{Error, Result};

const VERTEX_BITS: u32 = 21;
const MAX_POINTS: usize = 1 << VERTEX_BITS;

/// Upper bound on the filtration for dimension-1 simplices.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// The enclosing radius: past it the complex is a cone.
    #[default]
    Auto,
    Value(f64),
}

impl Threshold {
    pub fn resolve(self, dist: &DistanceMatrix) -> Result<f64> {
        match self {
            Threshold::Auto => Ok(dist.enclosing_radius()),
            Threshold::Value(t) if t.is_nan() || t < 0.0 => {
                Err(Error::Domain(format!("threshold must be >= 0, got {t}")))
            }
            Threshold::Value(t) => Ok(t),
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Threshold::Auto);
        }
        s.parse::<f64>()
            .map(Threshold::Value)
            .map_err(|_| Error::InvalidInput(format!("threshold must be a number or \"auto\", got {s:?}")))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Edge {
    pub value: f64,
    pub i: u32,
    pub j: u32,
}

/// All edges `i < j` sorted by `(value, i, j)`.
pub(crate) fn sorted_edges(dist: &DistanceMatrix) -> Vec<Edge> {
    let n = dist.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        let row = dist.row(i);
        for (j, &value) in row.iter().enumerate().skip(i + 1) {
            edges.push(Edge {
                value,
                i: i as u32,
                j: j as u32,
            });
        }
    }
    edges.sort_unstable_by(|a, b| a.value.total_cmp(&b.value).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j)));
    edges
}

#[derive(Debug, Clone, Copy)]
struct Triangle {
    value: f64,
    /// Sorted vertices packed so that numeric order is lexicographic order.
    code: u64,
}

impl PartialEq for Triangle {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for Triangle {}

impl PartialOrd for Triangle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Triangle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then(self.code.cmp(&other.code))
    }
}

#[inline]
fn pack(i: u32, j: u32, k: u32) -> u64 {
    // i < j is guaranteed by the edge list
    let (a, b, c) = if k < i {
        (k, i, j)
    } else if k < j {
        (i, k, j)
    } else {
        (i, j, k)
    };
    ((a as u64) << (2 * VERTEX_BITS)) | ((b as u64) << VERTEX_BITS) | c as u64
}

struct Coboundary<'a> {
    dist: &'a DistanceMatrix,
    threshold: f64,
}

impl Coboundary<'_> {
    fn push_cofacets(&self, e: &Edge, heap: &mut BinaryHeap<Reverse<Triangle>>) {
        let (ri, rj) = (self.dist.row(e.i as usize), self.dist.row(e.j as usize));
        for (k, (&dik, &djk)) in ri.iter().zip(rj).enumerate() {
            let k = k as u32;
            if k == e.i || k == e.j {
                continue;
            }
            let value = e.value.max(dik).max(djk);
            if value <= self.threshold {
                heap.push(Reverse(Triangle {
                    value,
                    code: pack(e.i, e.j, k),
                }));
            }
        }
    }

    /// Smallest cofacet sharing the edge's value, if one exists. Scanning `k`
    /// upward visits cofacets in lexicographic order.
    fn min_equal_cofacet(&self, e: &Edge) -> Option<Triangle> {
        let (ri, rj) = (self.dist.row(e.i as usize), self.dist.row(e.j as usize));
        ri.iter()
            .zip(rj)
            .enumerate()
            .find(|&(k, (&dik, &djk))| k as u32 != e.i && k as u32 != e.j && dik <= e.value && djk <= e.value)
            .map(|(k, _)| Triangle {
                value: e.value,
                code: pack(e.i, e.j, k as u32),
            })
    }
}

/// Pops the smallest entry with odd multiplicity.
fn pop_pivot(heap: &mut BinaryHeap<Reverse<Triangle>>) -> Option<Triangle> {
    while let Some(Reverse(top)) = heap.pop() {
        if matches!(heap.peek(), Some(Reverse(next)) if *next == top) {
            heap.pop();
            continue;
        }
        return Some(top);
    }
    None
}

/// Keeps entries of odd multiplicity.
fn mod2(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    out
}

fn dim1_intervals(dist: &DistanceMatrix, edges: &[Edge], cleared: &[bool], threshold: f64) -> Vec<Interval> {
    let cob = Coboundary { dist, threshold };
    let mut pivots: FxHashMap<u64, usize> = FxHashMap::default();
    let mut reductions: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
    let mut heap = BinaryHeap::new();
    let mut out = Vec::new();

    for col in (0..edges.len()).rev() {
        if cleared[col] {
            continue;
        }
        let e = edges[col];
        if let Some(t) = cob.min_equal_cofacet(&e) {
            if let Entry::Vacant(slot) = pivots.entry(t.code) {
                slot.insert(col);
                continue;
            }
        }

        heap.clear();
        let mut added = vec![col];
        cob.push_cofacets(&e, &mut heap);
        loop {
            let Some(pivot) = pop_pivot(&mut heap) else {
                if e.value < threshold {
                    out.push(Interval {
                        dim: 1,
                        birth: e.value,
                        death: threshold,
                        truncated: true,
                    });
                }
                break;
            };
            match pivots.get(&pivot.code) {
                Some(&other) => {
                    // the pivot is re-pushed so that it cancels against the
                    // copy contained in the other column
                    heap.push(Reverse(pivot));
                    match reductions.get(&other) {
                        Some(cols) => {
                            for &c in cols {
                                added.push(c);
                                cob.push_cofacets(&edges[c], &mut heap);
                            }
                        }
                        None => {
                            added.push(other);
                            cob.push_cofacets(&edges[other], &mut heap);
                        }
                    }
                }
                None => {
                    pivots.insert(pivot.code, col);
                    if pivot.value > e.value {
                        out.push(Interval {
                            dim: 1,
                            birth: e.value,
                            death: pivot.value,
                            truncated: false,
                        });
                    }
                    if added.len() > 1 {
                        let added = mod2(std::mem::take(&mut added));
                        if added.len() > 1 || added.first() != Some(&col) {
                            reductions.insert(col, added);
                        }
                    }
                    break;
                }
            }
        }
    }
    out
}

/// Persistence barcode of the Vietoris-Rips filtration of `dist`.
///
/// Dimension 0 always covers the complete graph, so it has exactly one
/// infinite bar and `N - 1` finite ones (the minimum spanning tree weights).
/// The threshold only bounds the dimension-1 computation; classes alive at the
/// threshold are reported with `death = threshold` and `truncated = true`.
pub fn rips_persistence(dist: &DistanceMatrix, max_dim: usize, threshold: Threshold) -> Result<Barcode> {
    if max_dim > 1 {
        return Err(Error::UnsupportedDimension(max_dim));
    }
    let threshold = threshold.resolve(dist)?;
    let n = dist.len();
    if n >= MAX_POINTS {
        return Err(Error::Size(format!(
            "at most {} points supported, got {n}",
            MAX_POINTS - 1
        )));
    }

    let edges = sorted_edges(dist);
    let mut intervals = Vec::with_capacity(n + 16);
    let mut merged = vec![false; edges.len()];
    let mut uf = UnionFind::new(n);
    let mut merges = 0;
    for (idx, e) in edges.iter().enumerate() {
        if merges + 1 >= n {
            break;
        }
        if uf.union(e.i as usize, e.j as usize) {
            merged[idx] = true;
            merges += 1;
            intervals.push(Interval {
                dim: 0,
                birth: 0.0,
                death: e.value,
                truncated: false,
            });
        }
    }
    intervals.push(Interval {
        dim: 0,
        birth: 0.0,
        death: f64::INFINITY,
        truncated: false,
    });

    if max_dim == 1 {
        let m = edges.partition_point(|e| e.value <= threshold);
        intervals.extend(dim1_intervals(dist, &edges[..m], &merged[..m], threshold));
    }
    Ok(Barcode::new(n, max_dim, threshold, intervals))
}
