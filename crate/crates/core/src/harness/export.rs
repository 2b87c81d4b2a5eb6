//! CSV and JSON exports of sweep results.
//!
//! Every float is written with 17 significant digits, so parsing an export
//! reproduces the in-memory values bit for bit.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::ensemble::EnsembleKind;
use crate::harness::io::{fmt_f64, parse_f64, to_json_string, write_json};
use crate::harness::ordering::{extract_extremes, sort_pairs, sorting_score};
use crate::harness::sweep::{BoundMode, SweepConfig, SweepFailure, SweepOutcome, SweepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HeatmapMetric {
    Tightness,
    Gain,
    OptimizedValue,
}

impl HeatmapMetric {
    pub const ALL: [HeatmapMetric; 3] = [HeatmapMetric::Tightness, HeatmapMetric::Gain, HeatmapMetric::OptimizedValue];

    pub fn value(&self, r: &SweepRecord) -> f64 {
        match self {
            HeatmapMetric::Tightness => r.tightness,
            HeatmapMetric::Gain => r.gain,
            HeatmapMetric::OptimizedValue => r.delta_d_prime,
        }
    }

    pub fn file_stem(&self) -> &'static str {
        match self {
            HeatmapMetric::Tightness => "tightness",
            HeatmapMetric::Gain => "gain",
            HeatmapMetric::OptimizedValue => "optimized_value",
        }
    }
}

/// Reproducibility data shared by every export of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportContext {
    pub config_hash: String,
    pub master_seed: u64,
    pub ensemble_kind: EnsembleKind,
    pub ensemble_seed: u64,
    pub ensemble_measure: String,
    pub bound_mode: BoundMode,
}

impl ExportContext {
    pub fn from_config(config: &SweepConfig) -> Result<Self> {
        let measure = if config.fixed_pairs.is_some() {
            "fixed pairs from config".to_string()
        } else {
            config.ensemble.kind.measure().to_string()
        };
        Ok(Self {
            config_hash: config_hash(config)?,
            master_seed: config.optimizer.seed,
            ensemble_kind: config.ensemble.kind,
            ensemble_seed: config.ensemble.seed,
            ensemble_measure: measure,
            bound_mode: config.bound_mode,
        })
    }
}

pub const ROW_ORDER_NOTE: &str =
    "rows follow the permutation: row 0 has the lowest sorting score; plot rows bottom-to-top in file order";

/// JSON sidecar written next to each heatmap CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapSidecar {
    pub metric: HeatmapMetric,
    pub n: usize,
    pub permutation: Vec<usize>,
    pub row_order: String,
    pub epsilon_grid: Vec<f64>,
    #[serde(flatten)]
    pub context: ExportContext,
}

/// SHA-256 (hex) of the config's canonical JSON.
pub fn config_hash(config: &SweepConfig) -> Result<String> {
    let digest = Sha256::digest(to_json_string(config)?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Matrix of one metric over `(pair, ε)` cells for copy number `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    /// Original pair index of each row.
    pub pairs: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn build_heatmap(records: &[SweepRecord], metric: HeatmapMetric, pi: &[usize], n: usize) -> Result<Heatmap> {
    let mut grid: BTreeMap<usize, f64> = BTreeMap::new();
    let mut cells: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for r in records.iter().filter(|r| r.n == n) {
        grid.insert(r.epsilon_index, r.epsilon);
        cells.insert((r.pair_index, r.epsilon_index), metric.value(r));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("no records for n = {n}")));
    }
    let distinct: BTreeSet<usize> = pi.iter().copied().collect();
    if distinct.len() != pi.len() {
        return Err(Error::InvalidArgument("permutation repeats a pair index".into()));
    }
    let mut missing = Vec::new();
    let mut values = Vec::with_capacity(pi.len());
    for &k in pi {
        let row: Vec<f64> = grid
            .iter()
            .map(|(&ei, &eps)| {
                cells.get(&(k, ei)).copied().unwrap_or_else(|| {
                    missing.push(format!("({k}, {eps})"));
                    f64::NAN
                })
            })
            .collect();
        values.push(row);
    }
    if !missing.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "heatmap for n = {n} is missing cells (pair, epsilon): {}",
            missing.join(", ")
        )));
    }
    Ok(Heatmap {
        pairs: pi.to_vec(),
        epsilons: grid.into_values().collect(),
        values,
    })
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes the heatmap CSV at `path` and its sidecar next to it (same stem,
/// `.json`).
pub fn export_heatmap(
    records: &[SweepRecord],
    metric: HeatmapMetric,
    pi: &[usize],
    n: usize,
    context: &ExportContext,
    path: &Path,
) -> Result<()> {
    let map = build_heatmap(records, metric, pi, n)?;
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["pair".to_string()];
    header.extend(map.epsilons.iter().map(|&e| fmt_f64(e)));
    w.write_record(&header)?;
    for (k, row) in map.pairs.iter().zip(&map.values) {
        let mut line = vec![k.to_string()];
        line.extend(row.iter().map(|&v| fmt_f64(v)));
        w.write_record(&line)?;
    }
    w.flush()?;
    let sidecar = HeatmapSidecar {
        metric,
        n,
        permutation: pi.to_vec(),
        row_order: ROW_ORDER_NOTE.into(),
        epsilon_grid: map.epsilons,
        context: context.clone(),
    };
    write_json(&sidecar, &sidecar_path(path))
}

pub fn read_heatmap(path: &Path) -> Result<Heatmap> {
    let mut r = csv::Reader::from_path(path)?;
    let epsilons = r.headers()?.iter().skip(1).map(parse_f64).collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut fields = rec.iter();
        let k = fields.next().ok_or_else(|| Error::Parse("empty heatmap row".into()))?;
        pairs.push(k.parse().map_err(|_| Error::Parse(format!("bad pair index '{k}'")))?);
        values.push(fields.map(parse_f64).collect::<Result<Vec<_>>>()?);
    }
    Ok(Heatmap { pairs, epsilons, values })
}

pub const RECORD_COLUMNS: [&str; 16] = [
    "pair_index",
    "epsilon_index",
    "epsilon",
    "n",
    "delta_d",
    "delta_d_prime",
    "beta",
    "beta_sharp",
    "tightness",
    "gain",
    "regime",
    "task_seed",
    "best_restart",
    "converged_restarts",
    "evaluations",
    "bound_mode",
];

pub fn write_records_csv(records: &[SweepRecord], bound_mode: BoundMode, path: &Path) -> Result<()> {
    let mode = match bound_mode {
        BoundMode::General => "GENERAL",
        BoundMode::Sharp => "SHARP",
    };
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record([
            r.pair_index.to_string(),
            r.epsilon_index.to_string(),
            fmt_f64(r.epsilon),
            r.n.to_string(),
            fmt_f64(r.delta_d),
            fmt_f64(r.delta_d_prime),
            fmt_f64(r.beta),
            fmt_f64(r.beta_sharp),
            fmt_f64(r.tightness),
            fmt_f64(r.gain),
            r.regime_str().to_string(),
            r.task_seed.to_string(),
            r.best_restart.to_string(),
            r.converged_restarts.to_string(),
            r.evaluations.to_string(),
            mode.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremes {
    pub n: usize,
    pub best: usize,
    pub worst: usize,
}

/// Contents of `metadata.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub config: SweepConfig,
    #[serde(flatten)]
    pub context: ExportContext,
    pub n_pairs: usize,
    pub permutation: Vec<usize>,
    pub permutation_source: String,
    pub sorting_scores: Option<Vec<f64>>,
    pub row_order: String,
    pub extremes: Vec<Extremes>,
    pub files: Vec<String>,
    pub failures: Vec<SweepFailure>,
    pub export_errors: Vec<String>,
}

/// Writes `records.csv`, one heatmap per (copy number, metric) and
/// `metadata.json` into `out_dir`. The permutation comes from the two-copy
/// sorting score and is shared by every heatmap.
pub fn write_sweep_outputs(config: &SweepConfig, outcome: &SweepOutcome, out_dir: &Path) -> Result<SweepMetadata> {
    std::fs::create_dir_all(out_dir)?;
    let context = ExportContext::from_config(config)?;
    let n_pairs = config.fixed_pairs.as_ref().map_or(config.ensemble.n_pairs, Vec::len);

    let (scores, permutation, source) = match sorting_score(&outcome.records, n_pairs) {
        Ok(s) => {
            let pi = sort_pairs(&s);
            (Some(s), pi, "ascending n = 2 strong-regime mean tightness".to_string())
        }
        Err(e) => (None, (0..n_pairs).collect(), format!("identity ({e})")),
    };

    let mut files = vec!["records.csv".to_string()];
    write_records_csv(&outcome.records, config.bound_mode, &out_dir.join("records.csv"))?;

    let mut export_errors = Vec::new();
    let mut extremes = Vec::new();
    for &n in &config.copy_numbers {
        for metric in HeatmapMetric::ALL {
            let name = format!("heatmap_n{n}_{}.csv", metric.file_stem());
            match export_heatmap(&outcome.records, metric, &permutation, n, &context, &out_dir.join(&name)) {
                Ok(()) => {
                    files.push(name.clone());
                    files.push(sidecar_path(Path::new(&name)).display().to_string());
                }
                Err(e) => export_errors.push(format!("{name}: {e}")),
            }
        }
        if let Ok((best, worst)) = extract_extremes(&outcome.records, n) {
            extremes.push(Extremes { n, best, worst });
        }
    }

    let meta = SweepMetadata {
        config: config.clone(),
        context,
        n_pairs,
        permutation,
        permutation_source: source,
        sorting_scores: scores,
        row_order: ROW_ORDER_NOTE.into(),
        extremes,
        files,
        failures: outcome.failures.clone(),
        export_errors,
    };
    write_json(&meta, &out_dir.join("metadata.json"))?;
    Ok(meta)
}
