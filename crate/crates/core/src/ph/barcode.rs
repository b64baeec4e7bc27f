use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One persistence interval. `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub dim: u8,
    pub birth: f64,
    #[serde(serialize_with = "ser_death", deserialize_with = "de_death")]
    pub death: f64,
    /// Set when a dimension-1 class was still alive at the threshold.
    #[serde(default)]
    pub truncated: bool,
}

impl Interval {
    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

fn ser_death<S: Serializer>(death: &f64, s: S) -> Result<S::Ok, S::Error> {
    if death.is_finite() {
        s.serialize_some(death)
    } else {
        s.serialize_none()
    }
}

fn de_death<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// Dimension 0 and 1 intervals of a filtration.
///
/// Intervals are kept sorted: dimension 0 by death, then dimension 1 by
/// `(birth, death)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    pub n_points: usize,
    pub max_dim: usize,
    /// Resolved threshold used for the dimension-1 computation.
    pub threshold: f64,
    pub intervals: Vec<Interval>,
}

impl Barcode {
    pub fn new(n_points: usize, max_dim: usize, threshold: f64, mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        Barcode {
            n_points,
            max_dim,
            threshold,
            intervals,
        }
    }

    pub fn dim(&self, dim: u8) -> impl Iterator<Item = &Interval> {
        self.intervals.iter().filter(move |iv| iv.dim == dim)
    }

    /// Finite dimension-0 deaths, ascending.
    pub fn finite_deaths_0(&self) -> Vec<f64> {
        self.dim(0).filter(|iv| !iv.is_infinite()).map(|iv| iv.death).collect()
    }

    /// `(birth, death)` of dimension-1 intervals, sorted.
    pub fn pairs_1(&self) -> Vec<(f64, f64)> {
        self.dim(1).map(|iv| (iv.birth, iv.death)).collect()
    }
}
