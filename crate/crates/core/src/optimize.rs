//! Multi-start gradient ascent of `ΔD′ₙ` over the dilation unitary.
//!
//! Each restart runs steepest ascent on central finite-difference gradients
//! with a backtracking line search (Armijo condition on the normalized
//! direction) and an adaptive step length that doubles after every accepted
//! step. Restart 0 starts from the swap seed, which reproduces the
//! undistilled dynamics; the others start from Gaussian parameters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::distill::{isometry_from_params, isometry_from_unitary, swap_seed, DistillationInstance, Parametrization};
use crate::error::{Error, Result};
use crate::operator::unitary_from_generator;
use crate::scalar::{CMatrix, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub n_restarts: usize,
    /// Per restart.
    pub max_iterations: usize,
    /// Central-difference spacing.
    pub gradient_step: f64,
    /// Stop once an accepted step improves the objective by less than this.
    pub convergence_tol: f64,
    pub seed: u64,
    /// Standard deviation of the Gaussian initial parameters.
    pub param_init_scale: f64,
    pub parametrization: Parametrization,
    /// Use the swap seed for restart 0.
    pub swap_seed: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_restarts: 16,
            max_iterations: 500,
            gradient_step: 1e-5,
            convergence_tol: 1e-8,
            seed: 0,
            param_init_scale: 1.0,
            parametrization: Parametrization::Isometry,
            swap_seed: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("optimizer config: {msg}")));
        if self.n_restarts == 0 {
            return bad("n_restarts must be >= 1");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be >= 1");
        }
        if !(1e-8..=1e-2).contains(&self.gradient_step) {
            return bad("gradient_step must lie in [1e-8, 1e-2]");
        }
        if !(self.convergence_tol > 0.0) {
            return bad("convergence_tol must be positive");
        }
        if !(self.param_init_scale > 0.0) || !self.param_init_scale.is_finite() {
            return bad("param_init_scale must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OptimizationResult<T: Scalar> {
    pub parametrization: Parametrization,
    pub best_theta: Vec<T>,
    pub best_value: T,
    /// Lowest restart index attaining `best_value`.
    pub best_restart: usize,
    pub restart_values: Vec<T>,
    pub iterations_used: Vec<usize>,
    pub converged: Vec<bool>,
    /// Largest objective value seen at any evaluation, line-search and
    /// finite-difference probes included.
    pub max_evaluated: T,
    pub evaluations: u64,
    /// Accepted objective values per restart.
    #[serde(skip)]
    pub history: Vec<Vec<T>>,
}

/// Isometry for a parameter vector, or an error for malformed input.
pub fn isometry_for<T: Scalar>(
    theta: &[T],
    instance: &DistillationInstance<T>,
    parametrization: Parametrization,
) -> Result<CMatrix<T>> {
    let dims = &instance.dims;
    let expected = dims.param_len(parametrization);
    if theta.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: theta.len(),
        });
    }
    match parametrization {
        Parametrization::FullUnitary => {
            let u = unitary_from_generator(theta, dims.total())?;
            Ok(isometry_from_unitary(&u, dims))
        }
        Parametrization::Isometry => isometry_from_params(theta, dims),
    }
}

/// `ΔD′ₙ` of the coarse-grainer described by `theta`.
pub fn objective<T: Scalar>(
    theta: &[T],
    instance: &DistillationInstance<T>,
    parametrization: Parametrization,
) -> Result<T> {
    let v = isometry_for(theta, instance, parametrization)?;
    Ok(instance.evaluate_isometry(&v))
}

/// Objective evaluator that tracks evaluation count and the largest value
/// seen. Rank-deficient isometry parameters evaluate to `-inf`.
struct Evaluator<'a, T: Scalar> {
    instance: &'a DistillationInstance<T>,
    parametrization: Parametrization,
    count: u64,
    max_seen: T,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    fn new(instance: &'a DistillationInstance<T>, parametrization: Parametrization) -> Self {
        Self {
            instance,
            parametrization,
            count: 0,
            max_seen: -T::max_value().unwrap_or(T::one()),
        }
    }

    fn eval(&mut self, theta: &[T]) -> T {
        self.count += 1;
        let value = match isometry_for(theta, self.instance, self.parametrization) {
            Ok(v) => self.instance.evaluate_isometry(&v),
            Err(_) => return -T::max_value().unwrap_or(T::one()),
        };
        if value > self.max_seen {
            self.max_seen = value;
        }
        value
    }

    fn gradient(&mut self, theta: &[T], step: T) -> Vec<T> {
        let mut probe = theta.to_vec();
        let two_h = step + step;
        (0..theta.len())
            .map(|k| {
                let orig = probe[k];
                probe[k] = orig + step;
                let up = self.eval(&probe);
                probe[k] = orig - step;
                let down = self.eval(&probe);
                probe[k] = orig;
                (up - down) / two_h
            })
            .collect()
    }
}

/// Central finite-difference gradient of [`objective`].
pub fn finite_difference_gradient<T: Scalar>(
    theta: &[T],
    instance: &DistillationInstance<T>,
    parametrization: Parametrization,
    step: T,
) -> Result<Vec<T>> {
    isometry_for(theta, instance, parametrization)?;
    Ok(Evaluator::new(instance, parametrization).gradient(theta, step))
}

struct RestartOutcome<T: Scalar> {
    theta: Vec<T>,
    value: T,
    iterations: usize,
    converged: bool,
    history: Vec<T>,
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

fn ascend<T: Scalar>(eval: &mut Evaluator<'_, T>, start: Vec<T>, config: &OptimizerConfig) -> RestartOutcome<T> {
    let step = T::lit(config.gradient_step);
    let tol = T::lit(config.convergence_tol);
    let armijo = T::lit(1e-4);
    let min_alpha = T::lit(1e-12);
    let max_alpha = T::lit(4.0);
    let mut theta = start;
    let mut value = eval.eval(&theta);
    let mut history = vec![value];
    let mut alpha = T::lit(0.1);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let grad = eval.gradient(&theta, step);
        let gnorm = norm(&grad);
        if !(gnorm > T::lit(1e-14)) {
            converged = true;
            break;
        }
        let mut accepted = None;
        while alpha >= min_alpha {
            let scale = alpha / gnorm;
            let trial: Vec<T> = theta.iter().zip(&grad).map(|(&t, &g)| t + scale * g).collect();
            let trial_value = eval.eval(&trial);
            if trial_value >= value + armijo * alpha * gnorm {
                accepted = Some((trial, trial_value));
                break;
            }
            alpha *= T::lit(0.5);
        }
        let Some((trial, trial_value)) = accepted else {
            // No ascent along the finite-difference gradient: a kink or a
            // numerically flat maximum.
            converged = true;
            break;
        };
        let improvement = trial_value - value;
        theta = trial;
        value = trial_value;
        history.push(value);
        alpha = (alpha + alpha).min(max_alpha);
        if improvement < tol {
            converged = true;
            break;
        }
    }
    RestartOutcome {
        theta,
        value,
        iterations,
        converged,
        history,
    }
}

/// Deterministic per-restart seed.
pub fn restart_seed(seed: u64, restart: usize) -> u64 {
    splitmix64(seed ^ splitmix64(restart as u64 + 0x5851_F42D_4C95_7F2D))
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn initial_point<T: Scalar>(
    instance: &DistillationInstance<T>,
    config: &OptimizerConfig,
    restart: usize,
) -> Vec<T> {
    if restart == 0 && config.swap_seed {
        if let Ok(seed) = swap_seed(&instance.dims, config.parametrization) {
            return seed;
        }
    }
    let len = instance.dims.param_len(config.parametrization);
    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(config.seed, restart));
    (0..len)
        .map(|_| {
            let g: f64 = StandardNormal.sample(&mut rng);
            T::lit(g * config.param_init_scale)
        })
        .collect()
}

/// Maximizes `ΔD′ₙ` over the coarse-graining map.
pub fn optimize<T: Scalar>(instance: &DistillationInstance<T>, config: &OptimizerConfig) -> Result<OptimizationResult<T>> {
    config.validate()?;
    let mut eval = Evaluator::new(instance, config.parametrization);
    let mut outcomes = Vec::with_capacity(config.n_restarts);
    for restart in 0..config.n_restarts {
        let start = initial_point(instance, config, restart);
        outcomes.push(ascend(&mut eval, start, config));
    }
    let mut best = 0;
    for (k, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = k;
        }
    }
    Ok(OptimizationResult {
        parametrization: config.parametrization,
        best_theta: outcomes[best].theta.clone(),
        best_value: outcomes[best].value,
        best_restart: best,
        restart_values: outcomes.iter().map(|o| o.value).collect(),
        iterations_used: outcomes.iter().map(|o| o.iterations).collect(),
        converged: outcomes.iter().map(|o| o.converged).collect(),
        max_evaluated: eval.max_seen,
        evaluations: eval.count,
        history: outcomes.into_iter().map(|o| o.history).collect(),
    })
}
