//! Activation files, dataset manifests, CSV interchange and synthetic data.

mod csv_io;
mod format;
mod manifest;
pub mod synth;

pub use csv_io::{read_cloud_csv, write_cloud_csv};
pub use format::{
    decode_activations, encode_activations, read_activation_file, read_activations, read_header, write_activations,
    ActivationHeader, HEADER_LEN, MAGIC, VERSION,
};
pub use manifest::{DataKind, Dataset, DatasetManifest};
pub use synth::{
    gen_condition_surrogate, gen_condition_surrogate_with, gen_layer_stack, gen_regular_ngon, gen_two_circles,
    FamilyParams, LayerStack, LayerStackConfig, SurrogateConfig,
};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::ph::{Condition, PointCloud};

/// Writes one activation file per (condition, layer) into `dir` plus
/// `manifest.json`, and returns the manifest path.
pub fn write_dataset(
    dir: &Path,
    model: &str,
    kind: DataKind,
    layers: &[(u32, Vec<(Condition, &PointCloud)>)],
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut files: BTreeMap<Condition, BTreeMap<u32, PathBuf>> = BTreeMap::new();
    let mut samples = BTreeMap::new();
    let mut d = 0;
    for (layer, clouds) in layers {
        for &(cond, cloud) in clouds {
            let name = PathBuf::from(format!("{cond}_layer{layer:03}.tlns"));
            write_activations(&dir.join(&name), cloud, *layer, Some(cond))?;
            files.entry(cond).or_default().insert(*layer, name);
            samples.insert(cond, cloud.len());
            d = cloud.dim();
        }
    }
    let manifest = DatasetManifest {
        model: model.to_string(),
        kind,
        d,
        layers: layers.iter().map(|(l, _)| *l).collect(),
        files,
        samples,
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, manifest.to_json()?)?;
    Ok(path)
}
