//! When can a coarse-graining map reach `‖λ(A)‖₁ − ‖λ(B)‖₁ = ‖A − B‖₁`?
//!
//! For traceless Hermitian `A`, `B` with `Δ = A − B`, saturation is possible
//! iff some `0 ≼ E₀ ≼ P₀` (P₀ the kernel projector of Δ) gives
//! `Tr((P₊ + E₀)B) ≥ 0`. The objective is linear in `E₀`, so the best witness
//! is the projector onto the positive eigenspace of `B` compressed to the
//! kernel, and the feasibility margin has a closed form.
//!
//! The companion inequality `Tr((P₊ + E₀)A) ≥ Tr((P₊ + E₀)B)` always holds:
//! the difference is `Tr Δ₊ ≥ 0` because `E₀Δ = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{check_input_dim, QuantumMap};
use crate::operator::{max_abs, spectral_split, trace_norm, HermitianOperator, SpectralSplit};
use crate::scalar::{CMatrix, Scalar};
#[cfg(test)]
use crate::scalar::cr;

/// Outcome of the saturation test.
#[derive(Debug, Clone)]
pub struct SaturationReport<T: Scalar> {
    pub feasible: bool,
    /// `Tr(P₊B) + Tr[(P₀BP₀)₊]`.
    pub margin: T,
    /// `Tr(P₊B)` alone.
    pub plus_overlap: T,
    /// Optimal `E₀`, present iff feasible.
    pub witness_e0: Option<HermitianOperator<T>>,
    pub split: SpectralSplit<T>,
    /// Some eigenvalue of Δ sits within two decades of the kernel threshold.
    pub near_degenerate: bool,
}

fn check_traceless<T: Scalar>(m: &HermitianOperator<T>) -> Result<()> {
    let tr = m.trace();
    if !(tr.abs() <= T::lit(T::CHECK_TOL)) {
        return Err(Error::NotTraceless(tr.to_f64_lossy()));
    }
    Ok(())
}

/// Saturation test with the default kernel threshold `T::ZERO_TOL`.
pub fn saturation_feasible<T: Scalar>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> Result<SaturationReport<T>> {
    saturation_feasible_with_tol(a, b, T::lit(T::ZERO_TOL))
}

pub fn saturation_feasible_with_tol<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    zero_tol: T,
) -> Result<SaturationReport<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    check_traceless(a)?;
    check_traceless(b)?;
    let delta = a - b;
    let split = spectral_split(&delta, zero_tol)?;
    let plus_overlap = split.p_plus.inner(b);

    let kernel = split.kernel_basis();
    let (kernel_gain, witness) = if kernel.ncols() == 0 {
        (T::zero(), HermitianOperator::zeros(a.dim()))
    } else {
        let compressed = HermitianOperator::from_hermitian_part(kernel.adjoint() * b.matrix() * &kernel);
        let (values, vectors) = compressed.eigh();
        let gain = values.iter().filter(|&&v| v > T::zero()).fold(T::zero(), |acc, &v| acc + v);
        let weights: Vec<T> = values
            .iter()
            .map(|&v| if v > T::zero() { T::one() } else { T::zero() })
            .collect();
        let local = HermitianOperator::from_spectrum(&vectors, &weights);
        let lifted = &kernel * local.matrix() * kernel.adjoint();
        (gain, HermitianOperator::from_hermitian_part(lifted))
    };
    let margin = plus_overlap + kernel_gain;
    let feasible = margin >= -T::lit(T::CHECK_TOL);
    let near_degenerate = split.near_degenerate();
    Ok(SaturationReport {
        feasible,
        margin,
        plus_overlap,
        witness_e0: feasible.then_some(witness),
        split,
        near_degenerate,
    })
}

/// Measure-and-prepare map `X ↦ Σ_k Tr(E_k X) |k⟩⟨k|` into `C^output_dim`.
#[derive(Debug, Clone)]
pub struct MeasurementMap<T: Scalar> {
    pub effects: Vec<HermitianOperator<T>>,
    pub output_dim: usize,
}

impl<T: Scalar> MeasurementMap<T> {
    pub fn new(effects: Vec<HermitianOperator<T>>, output_dim: usize) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidChannel("measurement needs at least one effect".into()))?;
        let dim = first.dim();
        if effects.len() > output_dim {
            return Err(Error::InvalidChannel(format!(
                "{} effects do not fit an output of dimension {output_dim}",
                effects.len()
            )));
        }
        if effects.iter().any(|e| e.dim() != dim) {
            return Err(Error::InvalidChannel("effects must share one dimension".into()));
        }
        Ok(Self { effects, output_dim })
    }

    /// Max-entry deviation of `Σ_k E_k` from the identity.
    pub fn completeness_defect(&self) -> T {
        let dim = self.effects[0].dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for e in &self.effects {
            sum += e.matrix();
        }
        max_abs(&(sum - CMatrix::identity(dim, dim)))
    }

    pub fn min_effect_eigenvalue(&self) -> T {
        self.effects
            .iter()
            .map(|e| e.min_eigenvalue())
            .fold(T::max_value().unwrap_or(T::one()), |acc, v| acc.min(v))
    }
}

impl<T: Scalar> QuantumMap<T> for MeasurementMap<T> {
    fn input_dim(&self) -> usize {
        self.effects[0].dim()
    }
    fn output_dim(&self) -> usize {
        self.output_dim
    }
    fn apply_matrix(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_input_dim(self.input_dim(), x)?;
        let mut out = CMatrix::zeros(self.output_dim, self.output_dim);
        for (k, e) in self.effects.iter().enumerate() {
            out[(k, k)] = (e.matrix() * x).trace();
        }
        Ok(out)
    }
}

/// Two-outcome map with effects `P₊ + E₀` and `I − P₊ − E₀` that saturates
/// the bound for a feasible pair.
pub fn construct_saturating_map<T: Scalar>(
    report: &SaturationReport<T>,
    output_dim: usize,
) -> Result<MeasurementMap<T>> {
    if output_dim < 2 {
        return Err(Error::InvalidArgument("output dimension must be >= 2".into()));
    }
    let e0 = match (&report.witness_e0, report.feasible) {
        (Some(e0), true) => e0,
        _ => return Err(Error::Infeasible(report.margin.to_f64_lossy())),
    };
    let first = &report.split.p_plus + e0;
    let dim = first.dim();
    let second = HermitianOperator::from_hermitian_part(CMatrix::identity(dim, dim) - first.matrix());
    MeasurementMap::new(vec![first, second], output_dim)
}

/// The three quantities whose equality defines saturation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaturationGap<T: Scalar> {
    /// `‖λ(A)‖₁ − ‖λ(B)‖₁`.
    pub norm_difference: T,
    /// `‖λ(A − B)‖₁`.
    pub mapped_delta_norm: T,
    /// `‖A − B‖₁`.
    pub delta_norm: T,
}

impl<T: Scalar> SaturationGap<T> {
    pub fn saturates(&self, tol: T) -> bool {
        (self.norm_difference - self.mapped_delta_norm).abs() <= tol && (self.mapped_delta_norm - self.delta_norm).abs() <= tol
    }
}

pub fn saturation_gap<T: Scalar, M: QuantumMap<T> + ?Sized>(
    map: &M,
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<SaturationGap<T>> {
    let delta = a - b;
    Ok(SaturationGap {
        norm_difference: trace_norm(&map.apply(a)?) - trace_norm(&map.apply(b)?),
        mapped_delta_norm: trace_norm(&map.apply(&delta)?),
        delta_norm: trace_norm(&delta),
    })
}

/// Both routes of the triangle-equality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TriangleCheck {
    /// `‖A + B‖₁ = ‖A‖₁ + ‖B‖₁` within tolerance.
    pub norm_equal: bool,
    /// `[A, B] = 0` within tolerance.
    pub commute: bool,
    /// `v_a v_b ≥ 0` on a common eigenbasis (only meaningful when commuting).
    pub signs_aligned: bool,
}

impl TriangleCheck {
    pub fn spectral_equal(&self) -> bool {
        self.commute && self.signs_aligned
    }

    pub fn agree(&self) -> bool {
        self.norm_equal == self.spectral_equal()
    }
}

pub fn triangle_equality_check<T: Scalar>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> Result<TriangleCheck> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let tol = T::lit(T::ZERO_TOL);
    let lhs = trace_norm(&(a + b));
    let rhs = trace_norm(a) + trace_norm(b);
    let norm_equal = (rhs - lhs).abs() <= tol;

    let commutator = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    let commute = max_abs(&commutator) <= tol;

    let signs_aligned = commute && {
        // Diagonalize A, then diagonalize B inside each eigenspace of A.
        let (values, vectors) = a.eigh();
        let mut aligned = true;
        let mut start = 0;
        while start < values.len() {
            let mut end = start + 1;
            while end < values.len() && (values[start] - values[end]).abs() <= tol {
                end += 1;
            }
            let block = vectors.columns(start, end - start).into_owned();
            let compressed = HermitianOperator::from_hermitian_part(block.adjoint() * b.matrix() * &block);
            let va = values[start];
            for vb in compressed.eigenvalues() {
                if va * vb < -tol {
                    aligned = false;
                }
            }
            start = end;
        }
        aligned
    };
    Ok(TriangleCheck {
        norm_equal,
        commute,
        signs_aligned,
    })
}

/// `‖A + B‖₁ = ‖A‖₁ + ‖B‖₁` within 1e-9 (norm route; see [`triangle_equality_check`]).
pub fn triangle_equality_holds<T: Scalar>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> Result<bool> {
    Ok(triangle_equality_check(a, b)?.norm_equal)
}

/// Both routes of the orthogonal-support test for `‖λ(Δ)‖₁ = ‖Δ‖₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrthogonalSupportCheck {
    pub norm_equal: bool,
    /// `Π±λ(Δ±)Π± = λ(Δ±)` and `Π±λ(Δ∓)Π± = 0`.
    pub projector_identities: bool,
    /// Δ or λ(Δ) has eigenvalues near the kernel threshold; the norm route
    /// is authoritative then.
    pub ambiguous: bool,
}

pub fn orthogonal_support_check<T: Scalar, M: QuantumMap<T> + ?Sized>(
    map: &M,
    delta: &HermitianOperator<T>,
) -> Result<OrthogonalSupportCheck> {
    let tol = T::lit(T::ZERO_TOL);
    let split = spectral_split(delta, tol)?;
    let image = map.apply(delta)?;
    let norm_equal = (trace_norm(&image) - trace_norm(delta)).abs() <= tol;

    let image_split = spectral_split(&image, tol)?;
    let pos = map.apply(&split.delta_plus)?;
    let neg = map.apply(&split.delta_minus)?;
    let sandwich = |p: &HermitianOperator<T>, x: &HermitianOperator<T>| p.matrix() * x.matrix() * p.matrix();
    let (pi_p, pi_m) = (&image_split.p_plus, &image_split.p_minus);
    let projector_identities = max_abs(&(sandwich(pi_p, &pos) - pos.matrix())) <= tol
        && max_abs(&sandwich(pi_p, &neg)) <= tol
        && max_abs(&(sandwich(pi_m, &neg) - neg.matrix())) <= tol
        && max_abs(&sandwich(pi_m, &pos)) <= tol;
    Ok(OrthogonalSupportCheck {
        norm_equal,
        projector_identities,
        ambiguous: split.near_degenerate() || image_split.near_degenerate(),
    })
}

/// `‖λ(Δ)‖₁ = ‖Δ‖₁` within 1e-9.
pub fn orthogonal_support_condition<T: Scalar, M: QuantumMap<T> + ?Sized>(
    map: &M,
    delta: &HermitianOperator<T>,
) -> Result<bool> {
    Ok(orthogonal_support_check(map, delta)?.norm_equal)
}

/// `Tr(E X)` helper used by witness checks.
pub fn expectation<T: Scalar>(effect: &HermitianOperator<T>, x: &HermitianOperator<T>) -> T {
    effect.inner(x)
}
