use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::format::{read_activations, read_header};
use crate::error::{Error, Result};
use crate::ph::{Condition, PointCloud};

/// What the rows of each file hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// Raw per-layer activations.
    #[default]
    Activations,
    /// Per-input activation differences.
    Differences,
}

/// JSON description of a dataset: one activation file per (condition, layer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub model: String,
    #[serde(default)]
    pub kind: DataKind,
    pub d: usize,
    pub layers: Vec<u32>,
    /// File paths, relative to the manifest's directory unless absolute.
    pub files: BTreeMap<Condition, BTreeMap<u32, PathBuf>>,
    /// Row count per condition; every layer of a condition has the same rows.
    pub samples: BTreeMap<Condition, usize>,
}

/// A manifest whose files have been checked against its declared shapes.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub root: PathBuf,
}

impl DatasetManifest {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks every referenced header against `d` and `samples` before any
    /// pipeline work starts.
    pub fn validate(self, root: &Path) -> Result<Dataset> {
        for (cond, per_layer) in &self.files {
            let expected_n = *self
                .samples
                .get(cond)
                .ok_or_else(|| Error::Manifest(format!("no sample count declared for condition {cond}")))?;
            for (layer, rel) in per_layer {
                let path = root.join(rel);
                if !path.is_file() {
                    return Err(Error::Manifest(format!(
                        "{cond} layer {layer}: file {} does not exist",
                        path.display()
                    )));
                }
                let h = read_header(&path)?;
                if h.n as usize != expected_n || h.d as usize != self.d {
                    return Err(Error::Manifest(format!(
                        "{cond} layer {layer}: {} has shape {}x{}, manifest declares {}x{}",
                        path.display(),
                        h.n,
                        h.d,
                        expected_n,
                        self.d
                    )));
                }
                if h.layer != *layer {
                    return Err(Error::Manifest(format!(
                        "{}: header layer {} disagrees with manifest layer {layer}",
                        path.display(),
                        h.layer
                    )));
                }
            }
        }
        Ok(Dataset {
            manifest: self,
            root: root.to_path_buf(),
        })
    }
}

impl Dataset {
    pub fn open(path: &Path) -> Result<Dataset> {
        let manifest = DatasetManifest::from_path(path)?;
        let root = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        manifest.validate(&root)
    }

    pub fn conditions(&self) -> Vec<Condition> {
        self.manifest.files.keys().copied().collect()
    }

    /// Fails with the full list of missing (condition, layer) pairs.
    pub fn require(&self, conditions: &[Condition], layers: &[u32]) -> Result<()> {
        let mut missing = Vec::new();
        for &c in conditions {
            for &l in layers {
                let present = self.manifest.files.get(&c).is_some_and(|m| m.contains_key(&l));
                if !present {
                    missing.push(format!("{c}/layer {l}"));
                }
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Coverage(missing))
        }
    }

    pub fn path(&self, condition: Condition, layer: u32) -> Result<PathBuf> {
        self.manifest
            .files
            .get(&condition)
            .and_then(|m| m.get(&layer))
            .map(|rel| self.root.join(rel))
            .ok_or_else(|| Error::Coverage(vec![format!("{condition}/layer {layer}")]))
    }

    pub fn load(&self, condition: Condition, layer: u32) -> Result<PointCloud> {
        read_activations(&self.path(condition, layer)?)
    }
}
