use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Condition label attached to activations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Clean,
    Poisoned,
    Executed,
    Refused,
    Ignored,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Clean,
        Condition::Poisoned,
        Condition::Executed,
        Condition::Refused,
        Condition::Ignored,
    ];

    /// On-disk code used by the binary activation header.
    pub fn code(self) -> u8 {
        match self {
            Condition::Clean => 0,
            Condition::Poisoned => 1,
            Condition::Executed => 2,
            Condition::Refused => 3,
            Condition::Ignored => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Condition> {
        Condition::ALL.into_iter().find(|c| c.code() == code)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Clean => "clean",
            Condition::Poisoned => "poisoned",
            Condition::Executed => "executed",
            Condition::Refused => "refused",
            Condition::Ignored => "ignored",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown condition label {s:?}")))
    }
}

/// Per-point provenance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointTag {
    pub condition: Option<Condition>,
    pub layer: Option<u32>,
    pub sample: Option<u64>,
}

/// `n` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    n: usize,
    d: usize,
    coords: Vec<f64>,
    tags: Option<Vec<PointTag>>,
}

impl PointCloud {
    pub fn new(coords: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Size(format!(
                "point cloud needs N >= 1 and D >= 1, got N = {n}, D = {d}"
            )));
        }
        if coords.len() != n * d {
            return Err(Error::Size(format!(
                "coordinate buffer has {} values, expected N*D = {}",
                coords.len(),
                n * d
            )));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite coordinate at point {}, axis {}",
                pos / d,
                pos % d
            )));
        }
        Ok(PointCloud {
            n,
            d,
            coords,
            tags: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut coords = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::Size(format!(
                    "row {i} has {} coordinates, expected {d}",
                    row.len()
                )));
            }
            coords.extend_from_slice(row);
        }
        PointCloud::new(coords, n, d)
    }

    pub fn with_tags(mut self, tags: Vec<PointTag>) -> Result<Self> {
        if tags.len() != self.n {
            return Err(Error::Size(format!(
                "metadata has {} entries for {} points",
                tags.len(),
                self.n
            )));
        }
        self.tags = Some(tags);
        Ok(self)
    }

    /// Tags every point with the same provenance.
    pub fn with_uniform_tag(self, condition: Option<Condition>, layer: Option<u32>) -> Self {
        let tags = (0..self.n)
            .map(|i| PointTag {
                condition,
                layer,
                sample: Some(i as u64),
            })
            .collect();
        PointCloud {
            tags: Some(tags),
            ..self
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn tags(&self) -> Option<&[PointTag]> {
        self.tags.as_deref()
    }

    /// Rows at `indices`, in the given order, with their tags.
    pub fn select(&self, indices: &[usize]) -> Result<PointCloud> {
        let mut coords = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            if i >= self.n {
                return Err(Error::Size(format!("index {i} out of range for {} points", self.n)));
            }
            coords.extend_from_slice(self.point(i));
        }
        let mut out = PointCloud::new(coords, indices.len(), self.d)?;
        if let Some(tags) = &self.tags {
            out.tags = Some(indices.iter().map(|&i| tags[i].clone()).collect());
        }
        Ok(out)
    }

    /// Multiplies every coordinate by `c`.
    pub fn scaled(&self, c: f64) -> Result<PointCloud> {
        let mut out = PointCloud::new(self.coords.iter().map(|v| v * c).collect(), self.n, self.d)?;
        out.tags = self.tags.clone();
        Ok(out)
    }
}
