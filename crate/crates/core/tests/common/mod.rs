//! Reference implementations used only by tests. Nothing here calls into the
//! persistence engine.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pairwise euclidean distances, computed independently of the library.
pub fn euclidean_matrix(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// MST edge weights by Kruskal with naive component relabelling, ascending.
pub fn kruskal_weights(d: &[Vec<f64>]) -> Vec<f64> {
    let n = d.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((d[i][j], i, j));
        }
    }
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut comp: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for (w, i, j) in edges {
        let (ci, cj) = (comp[i], comp[j]);
        if ci != cj {
            for c in comp.iter_mut() {
                if *c == cj {
                    *c = ci;
                }
            }
            out.push(w);
        }
    }
    out
}

#[derive(Debug, Clone)]
struct Simplex {
    verts: Vec<usize>,
    value: f64,
}

/// Full barcode by plain column reduction of the boundary matrix over GF(2).
///
/// Returns `(dim0_finite_deaths, dim0_infinite_count, dim1 intervals as
/// (birth, death, truncated))`, each sorted. Zero-length intervals are dropped
/// in dimension 1 and kept in dimension 0.
pub fn boundary_reduction(d: &[Vec<f64>], threshold: f64) -> (Vec<f64>, usize, Vec<(f64, f64, bool)>) {
    let n = d.len();
    let mut simplices = Vec::new();
    for i in 0..n {
        simplices.push(Simplex {
            verts: vec![i],
            value: 0.0,
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            if d[i][j] <= threshold {
                simplices.push(Simplex {
                    verts: vec![i, j],
                    value: d[i][j],
                });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = d[i][j].max(d[i][k]).max(d[j][k]);
                if v <= threshold {
                    simplices.push(Simplex {
                        verts: vec![i, j, k],
                        value: v,
                    });
                }
            }
        }
    }
    simplices.sort_by(|a, b| {
        a.value
            .partial_cmp(&b.value)
            .unwrap()
            .then(a.verts.len().cmp(&b.verts.len()))
            .then(a.verts.cmp(&b.verts))
    });
    let index: std::collections::HashMap<Vec<usize>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.verts.clone(), i))
        .collect();

    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|s| {
            if s.verts.len() == 1 {
                return Vec::new();
            }
            let mut col: Vec<usize> = (0..s.verts.len())
                .map(|skip| {
                    let face: Vec<usize> = s
                        .verts
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    index[&face]
                })
                .collect();
            col.sort_unstable();
            col
        })
        .collect();

    let mut low_to_col: std::collections::HashMap<usize, usize> = Default::default();
    let mut paired = vec![false; simplices.len()];
    let mut dim0 = Vec::new();
    let mut dim1 = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match low_to_col.get(&low) {
                Some(&other) => {
                    let add = columns[other].clone();
                    let mut merged = Vec::new();
                    let (mut a, mut b) = (0, 0);
                    let cur = &columns[j];
                    while a < cur.len() || b < add.len() {
                        if b == add.len() || (a < cur.len() && cur[a] < add[b]) {
                            merged.push(cur[a]);
                            a += 1;
                        } else if a == cur.len() || add[b] < cur[a] {
                            merged.push(add[b]);
                            b += 1;
                        } else {
                            a += 1;
                            b += 1;
                        }
                    }
                    columns[j] = merged;
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            low_to_col.insert(low, j);
            paired[low] = true;
            paired[j] = true;
            let birth = &simplices[low];
            let death = simplices[j].value;
            match birth.verts.len() {
                1 => dim0.push(death),
                2 => {
                    if death > birth.value {
                        dim1.push((birth.value, death, false));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    let mut infinite0 = 0;
    for (i, s) in simplices.iter().enumerate() {
        if paired[i] {
            continue;
        }
        match s.verts.len() {
            1 => infinite0 += 1,
            2 if s.value < threshold => dim1.push((s.value, threshold, true)),
            _ => {}
        }
    }
    dim0.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dim1.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (dim0, infinite0, dim1)
}

pub fn enclosing_radius(d: &[Vec<f64>]) -> f64 {
    d.iter()
        .map(|row| row.iter().cloned().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Uniform cloud in `[0, 1]^dim` with `n` points.
pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
