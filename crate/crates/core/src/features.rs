//! Barcode summaries: a fixed 41-component vectorization of a barcode.
//!
//! 35 components come from the grid {mean, min, q1, median, q3, max, std} x
//! {death of 0-bars, birth of 1-bars, death of 1-bars, persistence of 1-bars,
//! birth/death ratio of 1-bars}, listed statistic-major. The remaining six are
//! total persistence, bar count, and persistent entropy for 0- and 1-bars.
//!
//! Conventions: the infinite 0-bar is excluded everywhere except optionally
//! from the 0-bar count; quartiles interpolate linearly between order
//! statistics; standard deviations divide by `n`; an empty bar set yields zeros.

use std::io::Write;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ph::{Barcode, Condition};
use crate::stats::{mean, population_std, quantile_sorted};

pub const N_FEATURES: usize = 41;

/// Stability constant inside the entropy logarithm.
pub const ENTROPY_EPS: f64 = 1e-12;

pub const STATS: [&str; 7] = ["mean", "min", "q1", "median", "q3", "max", "std"];
pub const QUANTITIES: [&str; 5] = [
    "death_0bars",
    "birth_1bars",
    "death_1bars",
    "persistence_1bars",
    "ratio_birth_death_1bars",
];
pub const TOTALS: [&str; 6] = [
    "total_persistence_0bars",
    "total_persistence_1bars",
    "n_bars_0bars",
    "n_bars_1bars",
    "entropy_0bars",
    "entropy_1bars",
];

/// The 41 component names in order.
pub fn feature_names() -> &'static [String] {
    static NAMES: OnceLock<Vec<String>> = OnceLock::new();
    NAMES.get_or_init(|| {
        let mut names = Vec::with_capacity(N_FEATURES);
        for stat in STATS {
            for q in QUANTITIES {
                names.push(format!("{stat}_{q}"));
            }
        }
        names.extend(TOTALS.iter().map(|s| s.to_string()));
        names
    })
}

pub fn feature_index(name: &str) -> Option<usize> {
    feature_names().iter().position(|n| n == name)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryConfig {
    /// Count the infinite 0-bar in `n_bars_0bars` (N instead of N - 1).
    pub count_infinite_h0: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub subsample: Option<u64>,
    pub layer: Option<u32>,
    pub condition: Option<Condition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarcodeSummary {
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl BarcodeSummary {
    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).map(|i| self.values[i])
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

/// `-sum p_i ln(p_i + eps)` with `p_i = l_i / sum l`.
pub fn persistent_entropy(lengths: &[f64]) -> Result<f64> {
    if let Some(bad) = lengths.iter().find(|&&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::Domain(format!(
            "entropy needs positive finite lengths, got {bad}"
        )));
    }
    if lengths.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = lengths.iter().sum();
    let e = -lengths
        .iter()
        .map(|l| {
            let p = l / total;
            p * (p + ENTROPY_EPS).ln()
        })
        .sum::<f64>();
    Ok(e)
}

fn seven_stats(mut xs: Vec<f64>) -> [f64; 7] {
    if xs.is_empty() {
        return [0.0; 7];
    }
    xs.sort_by(f64::total_cmp);
    [
        mean(&xs),
        xs[0],
        quantile_sorted(&xs, 0.25),
        quantile_sorted(&xs, 0.5),
        quantile_sorted(&xs, 0.75),
        xs[xs.len() - 1],
        population_std(&xs),
    ]
}

fn positive_entropy(lengths: &[f64]) -> f64 {
    let positive: Vec<f64> = lengths.iter().copied().filter(|&l| l > 0.0).collect();
    persistent_entropy(&positive).expect("lengths filtered to positive finite values")
}

pub fn summarize(barcode: &Barcode, config: SummaryConfig) -> BarcodeSummary {
    let deaths0 = barcode.finite_deaths_0();
    let ones: Vec<(f64, f64)> = barcode
        .dim(1)
        .filter(|iv| iv.death.is_finite())
        .map(|iv| (iv.birth, iv.death))
        .collect();
    let births1: Vec<f64> = ones.iter().map(|p| p.0).collect();
    let deaths1: Vec<f64> = ones.iter().map(|p| p.1).collect();
    let pers1: Vec<f64> = ones.iter().map(|(b, d)| d - b).collect();
    let ratio1: Vec<f64> = ones.iter().map(|(b, d)| b / d).collect();

    let grid = [
        seven_stats(deaths0.clone()),
        seven_stats(births1),
        seven_stats(deaths1),
        seven_stats(pers1.clone()),
        seven_stats(ratio1),
    ];
    let mut values = Vec::with_capacity(N_FEATURES);
    for s in 0..STATS.len() {
        for q in &grid {
            values.push(q[s]);
        }
    }
    let infinite0 = barcode.dim(0).filter(|iv| iv.is_infinite()).count();
    let n0 = deaths0.len() + if config.count_infinite_h0 { infinite0 } else { 0 };
    values.extend([
        deaths0.iter().sum(),
        pers1.iter().sum(),
        n0 as f64,
        pers1.len() as f64,
        positive_entropy(&deaths0),
        positive_entropy(&pers1),
    ]);
    debug_assert_eq!(values.len(), N_FEATURES);
    BarcodeSummary {
        values,
        provenance: Provenance::default(),
    }
}

/// One row per summary: provenance columns followed by the 41 named features.
pub fn write_summaries_csv<W: Write>(out: W, summaries: &[BarcodeSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["subsample".to_string(), "layer".into(), "condition".into()];
    header.extend(feature_names().iter().cloned());
    w.write_record(&header)?;
    for s in summaries {
        let p = &s.provenance;
        let mut rec = vec![
            p.subsample.map(|v| v.to_string()).unwrap_or_default(),
            p.layer.map(|v| v.to_string()).unwrap_or_default(),
            p.condition.map(|c| c.to_string()).unwrap_or_default(),
        ];
        rec.extend(s.values.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summaries_csv<R: std::io::Read>(input: R) -> Result<Vec<BarcodeSummary>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let names = feature_names();
    let mut cols = Vec::with_capacity(N_FEATURES);
    for name in names {
        let pos = header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidInput(format!("summary CSV lacks column {name}")))?;
        cols.push(pos);
    }
    let find = |name: &str| header.iter().position(|h| h == name);
    let (sub_col, layer_col, cond_col) = (find("subsample"), find("layer"), find("condition"));
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |c: usize| -> Result<f64> {
            rec[c]
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("row {row}: cannot parse {:?} as a number", &rec[c])))
        };
        let values = cols.iter().map(|&c| parse(c)).collect::<Result<Vec<_>>>()?;
        let opt = |c: Option<usize>| c.map(|c| rec[c].to_string()).filter(|s| !s.is_empty());
        let provenance = Provenance {
            subsample: opt(sub_col).and_then(|s| s.parse().ok()),
            layer: opt(layer_col).and_then(|s| s.parse().ok()),
            condition: opt(cond_col).map(|s| s.parse()).transpose()?,
        };
        out.push(BarcodeSummary { values, provenance });
    }
    Ok(out)
}
