//! Multi-copy distillation of non-Markovianity for a two-step qubit channel
//! model.
//!
//! The numerical core is generic over the floating point [`Scalar`] (`f32` or
//! `f64`); the `*64` aliases below fix it to double precision, which is what
//! the experiment harness and the CLI use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod distill;
pub mod error;
pub mod harness;
pub mod maps;
pub mod operator;
pub mod optimize;
pub mod saturation;
pub mod scalar;

pub use channel::{
    apply_channel, apply_channel_power, classify_regime, computational_pair, difference_operator, intermediate_map,
    model_channels, IntermediateMap, PauliChannel, RegimeLabel,
};
pub use distill::{
    coarse_grain, distilled_delta_d, general_bound, undistilled_delta_d, Bounds, CoarseGrainer, DilationDims,
    DistillationInstance, DistillationRecord, Parametrization,
};
pub use error::{Error, PauliAxis, Result};
pub use maps::QuantumMap;
pub use operator::{partial_trace, spectral_split, tensor_power, trace_norm, unitary_from_generator, HermitianOperator, SpectralSplit};
pub use optimize::{finite_difference_gradient, objective, optimize, OptimizationResult, OptimizerConfig};
pub use saturation::{
    construct_saturating_map, orthogonal_support_condition, saturation_feasible, triangle_equality_holds,
    MeasurementMap, SaturationReport,
};
pub use scalar::{CMatrix, Scalar};

pub type HermitianOperator64 = HermitianOperator<f64>;
pub type SpectralSplit64 = SpectralSplit<f64>;
pub type PauliChannel64 = PauliChannel<f64>;
pub type IntermediateMap64 = IntermediateMap<f64>;
pub type CoarseGrainer64 = CoarseGrainer<f64>;
pub type DistillationInstance64 = DistillationInstance<f64>;
pub type DistillationRecord64 = DistillationRecord<f64>;
pub type SaturationReport64 = SaturationReport<f64>;
pub type MeasurementMap64 = MeasurementMap<f64>;
pub type OptimizationResult64 = OptimizationResult<f64>;
pub type CMatrix64 = CMatrix<f64>;
