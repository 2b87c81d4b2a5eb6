//! Ensemble sampling, sweeps and exports. Double precision only.

pub mod ensemble;
pub mod export;
pub mod io;
pub mod ordering;
pub mod sweep;

use crate::optimize::splitmix64;

pub use ensemble::{sample_ensemble, sample_pair, EnsembleKind, EnsembleSpec, StatePair};
pub use export::{
    build_heatmap, config_hash, export_heatmap, read_heatmap, write_records_csv, write_sweep_outputs, ExportContext,
    Heatmap, HeatmapMetric, HeatmapSidecar, SweepMetadata,
};
pub use io::{fmt_f64, to_json_string, MatrixJson, PairJson, PairsFile};
pub use ordering::{extract_extremes, sort_pairs, sorting_score};
pub use sweep::{default_epsilon_grid, run_sweep, task_seed, BoundMode, SweepConfig, SweepFailure, SweepOutcome, SweepRecord};

/// Order-sensitive hash of a sequence of integers into one seed.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}
