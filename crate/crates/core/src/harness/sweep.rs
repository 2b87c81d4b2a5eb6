//! ε-grid sweeps over an ensemble of state pairs.

use serde::{Deserialize, Serialize};

use crate::channel::{classify_regime, RegimeLabel};
use crate::distill::{ratio, DilationDims, DistillationInstance};
use crate::error::{Error, Result};
use crate::harness::ensemble::{sample_ensemble, EnsembleSpec, StatePair};
use crate::harness::io::PairJson;
use crate::harness::mix_seed;
use crate::optimize::{optimize, OptimizerConfig};

/// Bound used as the tightness denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum BoundMode {
    /// `β`, without the ½ prefactor.
    #[default]
    #[serde(rename = "GENERAL")]
    General,
    /// `β♯ = min{1, ½‖A − B‖₁}`.
    #[serde(rename = "SHARP")]
    Sharp,
}

/// 25 uniform points on [0.02, 0.48] with the singular point 0.25 removed.
pub fn default_epsilon_grid() -> Vec<f64> {
    (0..25)
        .map(|i| 0.02 + 0.46 * i as f64 / 24.0)
        .filter(|e| (e - 0.25).abs() > 1e-12)
        .collect()
}

fn default_copy_numbers() -> Vec<usize> {
    vec![2]
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_epsilon_grid")]
    pub epsilon_grid: Vec<f64>,
    #[serde(default = "default_copy_numbers")]
    pub copy_numbers: Vec<usize>,
    pub ensemble: EnsembleSpec,
    /// `optimizer.seed` is the master seed of the sweep.
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub bound_mode: BoundMode,
    #[serde(default = "two")]
    pub dim_r: usize,
    #[serde(default = "two")]
    pub dim_d: usize,
    /// Replaces the sampled ensemble when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_pairs: Option<Vec<PairJson>>,
}

impl SweepConfig {
    pub fn new(ensemble: EnsembleSpec) -> Self {
        Self {
            epsilon_grid: default_epsilon_grid(),
            copy_numbers: default_copy_numbers(),
            ensemble,
            optimizer: OptimizerConfig::default(),
            bound_mode: BoundMode::default(),
            dim_r: 2,
            dim_d: 2,
            fixed_pairs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(format!("sweep config: {msg}")));
        if let Some(e) = self.epsilon_grid.iter().find(|e| !(**e > 0.0 && **e < 0.5)) {
            return bad(format!("epsilon {e} outside (0, 0.5)"));
        }
        if self.epsilon_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("epsilon_grid must be strictly ascending".into());
        }
        for (i, &n) in self.copy_numbers.iter().enumerate() {
            if !(1..=3).contains(&n) {
                return bad(format!("copy number {n} not in {{1, 2, 3}}"));
            }
            if self.copy_numbers[..i].contains(&n) {
                return bad(format!("copy number {n} repeated"));
            }
        }
        match &self.fixed_pairs {
            Some(p) if p.is_empty() => return bad("fixed_pairs is empty".into()),
            None if self.ensemble.n_pairs == 0 => return bad("n_pairs must be >= 1".into()),
            _ => {}
        }
        DilationDims::new(1, self.dim_r, self.dim_d)?;
        self.optimizer.validate()
    }

    pub fn pairs(&self) -> Result<Vec<StatePair>> {
        match &self.fixed_pairs {
            Some(p) => p.iter().map(PairJson::to_pair).collect(),
            None => Ok(sample_ensemble(&self.ensemble)),
        }
    }
}

/// Seed of the optimizer run for one sweep cell.
pub fn task_seed(master: u64, pair_index: usize, epsilon_index: usize, n: usize) -> u64 {
    mix_seed(&[master, pair_index as u64, epsilon_index as u64, n as u64])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub pair_index: usize,
    pub epsilon_index: usize,
    pub epsilon: f64,
    pub n: usize,
    pub delta_d: f64,
    pub delta_d_prime: f64,
    pub beta: f64,
    pub beta_sharp: f64,
    /// `ΔD′ₙ` over the configured bound.
    pub tightness: f64,
    /// `ΔD′ₙ − ΔD`.
    pub gain: f64,
    /// `None` where the first channel is singular.
    pub regime: Option<RegimeLabel>,
    pub task_seed: u64,
    pub best_restart: usize,
    pub converged_restarts: usize,
    pub evaluations: u64,
}

impl SweepRecord {
    pub fn regime_str(&self) -> &'static str {
        self.regime.map_or("SINGULAR", |r| r.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub pair_index: usize,
    pub epsilon_index: usize,
    pub epsilon: f64,
    pub n: usize,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    /// Ordered by `(n, pair_index, epsilon_index)` following the config order.
    pub records: Vec<SweepRecord>,
    pub failures: Vec<SweepFailure>,
}

fn run_cell(config: &SweepConfig, pair: &StatePair, k: usize, ei: usize, n: usize) -> Result<SweepRecord> {
    let eps = config.epsilon_grid[ei];
    let dims = DilationDims::new(n, config.dim_r, config.dim_d)?;
    let instance = DistillationInstance::for_model(eps, pair.0.clone(), pair.1.clone(), dims)?;
    let seed = task_seed(config.optimizer.seed, k, ei, n);
    let opt_config = OptimizerConfig {
        seed,
        ..config.optimizer.clone()
    };
    let result = optimize(&instance, &opt_config)?;
    let bound = match config.bound_mode {
        BoundMode::General => instance.bounds.beta,
        BoundMode::Sharp => instance.bounds.beta_sharp,
    };
    Ok(SweepRecord {
        pair_index: k,
        epsilon_index: ei,
        epsilon: eps,
        n,
        delta_d: instance.delta_d,
        delta_d_prime: result.best_value,
        beta: instance.bounds.beta,
        beta_sharp: instance.bounds.beta_sharp,
        tightness: ratio(result.best_value, bound),
        gain: result.best_value - instance.delta_d,
        regime: classify_regime(eps).ok(),
        task_seed: seed,
        best_restart: result.best_restart,
        converged_restarts: result.converged.iter().filter(|c| **c).count(),
        evaluations: result.evaluations,
    })
}

/// Runs every `(pair, ε, n)` cell. Only an invalid config is an error; cell
/// failures are collected in [`SweepOutcome::failures`].
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let pairs = config.pairs()?;
    let mut out = SweepOutcome::default();
    for &n in &config.copy_numbers {
        for (k, pair) in pairs.iter().enumerate() {
            for ei in 0..config.epsilon_grid.len() {
                match run_cell(config, pair, k, ei, n) {
                    Ok(r) => out.records.push(r),
                    Err(e) => out.failures.push(SweepFailure {
                        pair_index: k,
                        epsilon_index: ei,
                        epsilon: config.epsilon_grid[ei],
                        n,
                        error: e.to_string(),
                    }),
                }
            }
        }
    }
    Ok(out)
}
