use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ph::Condition;
use crate::seed;

/// Which two groups of rows are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    /// Clean rows against every non-clean row.
    CleanVsAdversarial,
    /// Clean rows against rows with one label.
    CleanVs(Condition),
    /// Two random halves of the clean rows.
    CleanClean,
    /// Two random halves of the non-clean rows.
    PoisonedPoisoned,
    /// Two random halves each holding half the clean and half the non-clean rows.
    MixedMixed,
}

impl Comparison {
    pub const ABLATIONS: [Comparison; 3] = [
        Comparison::CleanClean,
        Comparison::PoisonedPoisoned,
        Comparison::MixedMixed,
    ];

    fn tag(self) -> u64 {
        match self {
            Comparison::CleanVsAdversarial => 0,
            Comparison::CleanVs(c) => 10 + c.code() as u64,
            Comparison::CleanClean => 1,
            Comparison::PoisonedPoisoned => 2,
            Comparison::MixedMixed => 3,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comparison::CleanVsAdversarial => f.write_str("clean_vs_adversarial"),
            Comparison::CleanVs(c) => write!(f, "clean_vs_{c}"),
            Comparison::CleanClean => f.write_str("clean_clean"),
            Comparison::PoisonedPoisoned => f.write_str("poisoned_poisoned"),
            Comparison::MixedMixed => f.write_str("mixed_mixed"),
        }
    }
}

impl FromStr for Comparison {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clean_vs_adversarial" => Ok(Comparison::CleanVsAdversarial),
            "clean_clean" => Ok(Comparison::CleanClean),
            "poisoned_poisoned" => Ok(Comparison::PoisonedPoisoned),
            "mixed_mixed" => Ok(Comparison::MixedMixed),
            other => other
                .strip_prefix("clean_vs_")
                .and_then(|c| c.parse::<Condition>().ok())
                .filter(|c| *c != Condition::Clean)
                .map(Comparison::CleanVs)
                .ok_or_else(|| Error::InvalidInput(format!("unknown comparison {s:?}"))),
        }
    }
}

impl Serialize for Comparison {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Comparison {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Row indices of the two groups plus those left out to balance them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub dropped: Vec<usize>,
}

fn shuffled(mut idx: Vec<usize>, seed: u64, tag: u64) -> Vec<usize> {
    idx.shuffle(&mut seed::rng(seed, &[0xab, tag]));
    idx
}

/// Splits `idx` into two equal halves; an odd leftover goes to `dropped`.
fn halves(idx: Vec<usize>, seed: u64, tag: u64) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let idx = shuffled(idx, seed, tag);
    let h = idx.len() / 2;
    (idx[..h].to_vec(), idx[h..2 * h].to_vec(), idx[2 * h..].to_vec())
}

/// Groups for `comparison` over rows labelled `labels`. Each output list is
/// ascending.
pub fn partition(labels: &[Condition], comparison: Comparison, seed: u64) -> Result<Partition> {
    let clean: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == Condition::Clean).collect();
    let other: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] != Condition::Clean).collect();
    let tag = comparison.tag();
    let (mut a, mut b, mut dropped) = match comparison {
        Comparison::CleanVsAdversarial => (clean, other, Vec::new()),
        Comparison::CleanVs(c) => {
            let chosen: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
            (clean, chosen, Vec::new())
        }
        Comparison::CleanClean => halves(clean, seed, tag),
        Comparison::PoisonedPoisoned => halves(other, seed, tag),
        Comparison::MixedMixed => {
            let (ca, cb, cd) = halves(clean, seed, tag);
            let (oa, ob, od) = halves(other, seed, tag + 100);
            (
                ca.into_iter().chain(oa).collect(),
                cb.into_iter().chain(ob).collect(),
                cd.into_iter().chain(od).collect(),
            )
        }
    };
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Size(format!(
            "{comparison} needs >= 2 rows per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    a.sort_unstable();
    b.sort_unstable();
    dropped.sort_unstable();
    Ok(Partition { a, b, dropped })
}
