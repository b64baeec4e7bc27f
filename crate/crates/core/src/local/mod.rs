//! Neuron-level analysis: two-layer embeddings of single activation vectors,
//! layer sweeps of their barcode statistics and peak agreement of the curves.

mod embedding;
mod peaks;
mod sweep;

pub use embedding::{
    normalize_vector, normalized_embedding, pair_embedding, permute_control, LayerPairEmbedding, Variant,
};
pub use peaks::{
    exact_p_value, find_peaks, monte_carlo_p_value, peak_precision_at_k, top_k_peaks, NullMethod, PeakPrecision,
    DEFAULT_PERMUTATIONS, EXACT_MAX_AXIS,
};
pub use sweep::{
    default_statistics, layer_pairs, layer_sweep, peak_table, write_peak_csv, CurveKind, LayerSource, LayerSweep,
    PeakRow, SweepConfig, SweepPoint, DEFAULT_PEAK_KS, DEFAULT_SWEEP_SAMPLES,
};
