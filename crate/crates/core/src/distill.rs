//! Coarse-graining maps built from a Stinespring dilation, the undistilled and
//! distilled distinguishability changes, and the bounds that cap them.
//!
//! The dilation space is ordered `(system copies m, auxiliary r, output d)`.
//! A coarse-grainer only ever sees inputs of the form `ψ ⊗ |0_r⟩⟨0_r| ⊗
//! |0_d⟩⟨0_d|`, so the map is determined by the `m` columns of `U` at indices
//! `i·r·d`; those columns form the isometry `V` used for evaluation.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channel::{difference_operator, validate_state, PauliChannel};
use crate::error::{Error, Result};
use crate::maps::{check_input_dim, cptp_diagnostics, CptpDiagnostics, QuantumMap};
use crate::operator::{
    exp_i_hermitian, generator_from_hermitian, hermitian_from_generator, kron, partial_trace, tensor_power, trace_norm,
    trace_norm_2x2, HermitianOperator,
};
use crate::scalar::{cr, CMatrix, Scalar};

/// Dimensions of the dilation space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DilationDims {
    pub n_copies: usize,
    pub dim_r: usize,
    pub dim_d: usize,
}

impl DilationDims {
    pub fn new(n_copies: usize, dim_r: usize, dim_d: usize) -> Result<Self> {
        if n_copies == 0 || n_copies > 8 {
            return Err(Error::InvalidArgument(format!("n_copies must be in 1..=8, got {n_copies}")));
        }
        if dim_d == 0 || dim_r == 0 || dim_r > dim_d {
            return Err(Error::InvalidArgument(format!(
                "dilation requires 1 <= r <= d, got r = {dim_r}, d = {dim_d}"
            )));
        }
        Ok(Self {
            n_copies,
            dim_r,
            dim_d,
        })
    }

    /// `r = d = 2`.
    pub fn qubit_default(n_copies: usize) -> Result<Self> {
        Self::new(n_copies, 2, 2)
    }

    pub fn dim_m(&self) -> usize {
        1 << self.n_copies
    }

    /// `N = m·r·d`.
    pub fn total(&self) -> usize {
        self.dim_m() * self.dim_r * self.dim_d
    }

    /// Column of `U` fed by `|i⟩ ⊗ |0_r⟩ ⊗ |0_d⟩`.
    pub fn input_column(&self, i: usize) -> usize {
        i * self.dim_r * self.dim_d
    }

    pub fn param_len(&self, parametrization: Parametrization) -> usize {
        let n = self.total();
        match parametrization {
            Parametrization::FullUnitary => n * n,
            Parametrization::Isometry => 2 * n * self.dim_m(),
        }
    }
}

/// How a parameter vector describes the dilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    /// `θ ∈ R^{N²}` generating `U = exp(iH(θ))` in the basis of
    /// [`hermitian_from_generator`].
    FullUnitary,
    /// `w ∈ R^{2Nm}`: real parts then imaginary parts (row-major) of an
    /// `N×m` matrix `W`, projected to the isometry `V = W (W†W)^{-1/2}`.
    #[default]
    Isometry,
}

/// CPTP map `λ_U(ψ) = Tr_{m,r}[U(ψ ⊗ |0_r⟩⟨0_r| ⊗ |0_d⟩⟨0_d|)U†]`.
#[derive(Debug, Clone)]
pub struct CoarseGrainer<T: Scalar> {
    dims: DilationDims,
    parametrization: Parametrization,
    theta: Vec<T>,
    unitary: Option<CMatrix<T>>,
    isometry: CMatrix<T>,
}

/// Isometry columns of a full dilation unitary.
pub fn isometry_from_unitary<T: Scalar>(u: &CMatrix<T>, dims: &DilationDims) -> CMatrix<T> {
    let n = dims.total();
    let m = dims.dim_m();
    let mut v = CMatrix::zeros(n, m);
    for i in 0..m {
        v.set_column(i, &u.column(dims.input_column(i)));
    }
    v
}

/// `V = W (W†W)^{-1/2}`; fails if `W` is (numerically) rank deficient.
pub fn isometry_from_params<T: Scalar>(w: &[T], dims: &DilationDims) -> Result<CMatrix<T>> {
    let n = dims.total();
    let m = dims.dim_m();
    if w.len() != 2 * n * m {
        return Err(Error::DimensionMismatch {
            expected: 2 * n * m,
            found: w.len(),
        });
    }
    let raw = DMatrix::from_fn(n, m, |a, i| Complex::new(w[a * m + i], w[n * m + a * m + i]));
    polar_isometry(&raw)
}

pub(crate) fn polar_isometry<T: Scalar>(raw: &CMatrix<T>) -> Result<CMatrix<T>> {
    let gram = HermitianOperator::from_hermitian_part(raw.adjoint() * raw);
    let (values, vectors) = gram.eigh();
    let floor = T::lit(1e-24);
    let lowest = *values.last().expect("m >= 1");
    if !(lowest > floor * values[0].max(T::one())) {
        return Err(Error::InvalidArgument("isometry parameters are rank deficient".into()));
    }
    let inv_sqrt: Vec<T> = values.iter().map(|&v| T::one() / v.sqrt()).collect();
    let root = HermitianOperator::from_spectrum(&vectors, &inv_sqrt);
    Ok(raw * root.matrix())
}

/// Inverse of [`isometry_from_params`] for an exact isometry.
pub fn params_from_isometry<T: Scalar>(v: &CMatrix<T>) -> Vec<T> {
    let (n, m) = v.shape();
    let mut w = vec![T::zero(); 2 * n * m];
    for a in 0..n {
        for i in 0..m {
            w[a * m + i] = v[(a, i)].re;
            w[n * m + a * m + i] = v[(a, i)].im;
        }
    }
    w
}

/// Permutation unitary exchanging the first system qubit with the output
/// qubit. Requires `dim_d = 2`.
pub fn swap_unitary<T: Scalar>(dims: &DilationDims) -> Result<CMatrix<T>> {
    if dims.dim_d != 2 {
        return Err(Error::InvalidArgument("swap seed requires dim_d = 2".into()));
    }
    let n = dims.total();
    let rest = dims.dim_m() / 2;
    let (r, d) = (dims.dim_r, dims.dim_d);
    let mut s = CMatrix::zeros(n, n);
    for q0 in 0..2 {
        for tail in 0..rest {
            for b in 0..r {
                for out in 0..d {
                    let from = ((q0 * rest + tail) * r + b) * d + out;
                    let to = ((out * rest + tail) * r + b) * d + q0;
                    s[(to, from)] = cr(T::one());
                }
            }
        }
    }
    Ok(s)
}

/// Generator of the swap seed: `H = (π/2)(I − S)`, so `exp(iH) = S`.
pub fn swap_generator<T: Scalar>(dims: &DilationDims) -> Result<Vec<T>> {
    let s = swap_unitary::<T>(dims)?;
    let n = dims.total();
    let half_pi = T::frac_pi_2();
    let h = (CMatrix::identity(n, n) - s).map(|z| z * half_pi);
    Ok(generator_from_hermitian(&HermitianOperator::from_hermitian_part(h)))
}

/// Seed parameters reproducing the swap map in the given parametrization.
pub fn swap_seed<T: Scalar>(dims: &DilationDims, parametrization: Parametrization) -> Result<Vec<T>> {
    match parametrization {
        Parametrization::FullUnitary => swap_generator(dims),
        Parametrization::Isometry => {
            let s = swap_unitary::<T>(dims)?;
            Ok(params_from_isometry(&isometry_from_unitary(&s, dims)))
        }
    }
}

/// `Σ_e K_e X K_e†` with `K_e` the `d`-row blocks of `V`.
pub(crate) fn compress<T: Scalar>(v: &CMatrix<T>, x: &CMatrix<T>, d: usize) -> CMatrix<T> {
    compress_impl(v, x, d, false)
}

/// [`compress`] for Hermitian `X`; only the upper triangle is computed.
pub(crate) fn compress_hermitian<T: Scalar>(v: &CMatrix<T>, x: &CMatrix<T>, d: usize) -> CMatrix<T> {
    compress_impl(v, x, d, true)
}

fn compress_impl<T: Scalar>(v: &CMatrix<T>, x: &CMatrix<T>, d: usize, hermitian: bool) -> CMatrix<T> {
    let y = v * x;
    let (n, m) = v.shape();
    let env = n / d;
    let mut out = CMatrix::zeros(d, d);
    for cc in 0..d {
        let start = if hermitian { cc } else { 0 };
        for cc2 in start..d {
            let mut acc = Complex::new(T::zero(), T::zero());
            for e in 0..env {
                let row = e * d + cc;
                let row2 = e * d + cc2;
                for k in 0..m {
                    acc += y[(row, k)] * v[(row2, k)].conj();
                }
            }
            out[(cc, cc2)] = acc;
            if hermitian && cc != cc2 {
                out[(cc2, cc)] = acc.conj();
            }
        }
    }
    out
}

fn output_trace_norm<T: Scalar>(out: &CMatrix<T>) -> T {
    if out.nrows() == 2 {
        trace_norm_2x2(out)
    } else {
        trace_norm(&HermitianOperator::from_hermitian_part(out.clone()))
    }
}

impl<T: Scalar> CoarseGrainer<T> {
    /// Builds the map and verifies that it is CPTP (Choi PSD within 1e-9,
    /// trace preservation within `T::CHECK_TOL`).
    pub fn new(dims: DilationDims, parametrization: Parametrization, theta: Vec<T>) -> Result<Self> {
        let cg = Self::unverified(dims, parametrization, theta)?;
        let diag = cg.cptp_diagnostics()?;
        let psd_tol = T::lit(T::ZERO_TOL);
        if !diag.is_cptp(psd_tol, T::lit(T::CHECK_TOL)) {
            return Err(Error::InvalidChannel(format!(
                "dilation map failed the CPTP check (Choi min eigenvalue {}, trace defect {})",
                diag.choi_min_eigenvalue.to_f64_lossy(),
                diag.trace_defect.to_f64_lossy()
            )));
        }
        Ok(cg)
    }

    pub fn from_generator(dims: DilationDims, theta: Vec<T>) -> Result<Self> {
        Self::new(dims, Parametrization::FullUnitary, theta)
    }

    pub fn from_isometry_params(dims: DilationDims, w: Vec<T>) -> Result<Self> {
        Self::new(dims, Parametrization::Isometry, w)
    }

    /// `θ = 0`: `U = I`, the constant map onto `|0_d⟩⟨0_d|`.
    pub fn identity_dilation(dims: DilationDims) -> Result<Self> {
        let n = dims.total();
        Self::from_generator(dims, vec![T::zero(); n * n])
    }

    /// Swaps the first system qubit into the output slot.
    pub fn swap(dims: DilationDims) -> Result<Self> {
        let theta = swap_generator(&dims)?;
        Self::from_generator(dims, theta)
    }

    pub(crate) fn unverified(dims: DilationDims, parametrization: Parametrization, theta: Vec<T>) -> Result<Self> {
        let expected = dims.param_len(parametrization);
        if theta.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: theta.len(),
            });
        }
        let (unitary, isometry) = match parametrization {
            Parametrization::FullUnitary => {
                let h = hermitian_from_generator(&theta, dims.total())?;
                let u = exp_i_hermitian(&h);
                let v = isometry_from_unitary(&u, &dims);
                (Some(u), v)
            }
            Parametrization::Isometry => (None, isometry_from_params(&theta, &dims)?),
        };
        Ok(Self {
            dims,
            parametrization,
            theta,
            unitary,
            isometry,
        })
    }

    pub fn dims(&self) -> DilationDims {
        self.dims
    }

    pub fn parametrization(&self) -> Parametrization {
        self.parametrization
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    /// The dilation unitary, available for [`Parametrization::FullUnitary`].
    pub fn unitary(&self) -> Option<&CMatrix<T>> {
        self.unitary.as_ref()
    }

    /// `N×m` isometry actually used by the map.
    pub fn isometry(&self) -> &CMatrix<T> {
        &self.isometry
    }

    pub fn cptp_diagnostics(&self) -> Result<CptpDiagnostics<T>> {
        cptp_diagnostics(self)
    }

    /// Evaluates the dilation formula literally: embeds `ψ` with the two
    /// ancillas, conjugates by the full `U` and traces out `(m, r)`.
    pub fn coarse_grain_via_dilation(&self, psi: &CMatrix<T>) -> Result<CMatrix<T>> {
        let u = self
            .unitary
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("no full unitary for an isometry-parametrized map".into()))?;
        check_input_dim(self.dims.dim_m(), psi)?;
        let mut anc_r = CMatrix::zeros(self.dims.dim_r, self.dims.dim_r);
        anc_r[(0, 0)] = cr(T::one());
        let mut anc_d = CMatrix::zeros(self.dims.dim_d, self.dims.dim_d);
        anc_d[(0, 0)] = cr(T::one());
        let embedded = kron(&kron(psi, &anc_r), &anc_d);
        let rotated = u * embedded * u.adjoint();
        partial_trace(
            &rotated,
            &[self.dims.dim_m(), self.dims.dim_r, self.dims.dim_d],
            &[2],
        )
    }
}

impl<T: Scalar> QuantumMap<T> for CoarseGrainer<T> {
    fn input_dim(&self) -> usize {
        self.dims.dim_m()
    }
    fn output_dim(&self) -> usize {
        self.dims.dim_d
    }
    fn apply_matrix(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_input_dim(self.dims.dim_m(), x)?;
        Ok(compress(&self.isometry, x, self.dims.dim_d))
    }
}

/// `λ_U(ψ)`.
pub fn coarse_grain<T: Scalar>(cg: &CoarseGrainer<T>, psi: &HermitianOperator<T>) -> Result<HermitianOperator<T>> {
    cg.apply(psi)
}

fn check_pair<T: Scalar>(rho1: &HermitianOperator<T>, rho2: &HermitianOperator<T>) -> Result<()> {
    for rho in [rho1, rho2] {
        check_input_dim(2, rho.matrix())?;
        validate_state(rho)?;
    }
    Ok(())
}

/// `ΔD = ½(‖Λ₂(ρ₂−ρ₁)‖₁ − ‖Λ₁(ρ₂−ρ₁)‖₁)`.
pub fn undistilled_delta_d<T: Scalar>(
    lam1: &PauliChannel<T>,
    lam2: &PauliChannel<T>,
    rho1: &HermitianOperator<T>,
    rho2: &HermitianOperator<T>,
) -> Result<T> {
    check_pair(rho1, rho2)?;
    let diff = rho2 - rho1;
    let late = trace_norm(&lam2.apply(&diff)?);
    let early = trace_norm(&lam1.apply(&diff)?);
    Ok(T::lit(0.5) * (late - early))
}

/// `ΔD′ₙ = ½(‖λ_U(A)‖₁ − ‖λ_U(B)‖₁)` with `A = Λ₂^{⊗n}(ρ₂^{⊗n} − ρ₁^{⊗n})`
/// and `B = Λ₁^{⊗n}(ρ₂^{⊗n} − ρ₁^{⊗n})`.
pub fn distilled_delta_d<T: Scalar>(
    cg: &CoarseGrainer<T>,
    lam1: &PauliChannel<T>,
    lam2: &PauliChannel<T>,
    rho1: &HermitianOperator<T>,
    rho2: &HermitianOperator<T>,
) -> Result<T> {
    let n = cg.dims().n_copies;
    let a = difference_operator(lam2, rho1, rho2, n)?;
    let b = difference_operator(lam1, rho1, rho2, n)?;
    let la = trace_norm(&cg.apply(&a)?);
    let lb = trace_norm(&cg.apply(&b)?);
    Ok(T::lit(0.5) * (la - lb))
}

/// Upper bounds on `ΔD′ₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Bounds<T: Scalar> {
    /// `min{1, ‖Λ₂(ρ₂)^{⊗n} − Λ₂(ρ₁)^{⊗n} − Λ₁(ρ₂)^{⊗n} + Λ₁(ρ₁)^{⊗n}‖₁}`.
    pub beta: T,
    /// `min{1, ½‖A − B‖₁}`.
    pub beta_sharp: T,
}

pub fn general_bound<T: Scalar>(
    lam1: &PauliChannel<T>,
    lam2: &PauliChannel<T>,
    rho1: &HermitianOperator<T>,
    rho2: &HermitianOperator<T>,
    n: usize,
) -> Result<Bounds<T>> {
    check_pair(rho1, rho2)?;
    if n == 0 {
        return Err(Error::InvalidArgument("copy number must be >= 1".into()));
    }
    let pow = |ch: &PauliChannel<T>, rho: &HermitianOperator<T>| -> Result<CMatrix<T>> {
        tensor_power(ch.apply(rho)?.matrix(), n)
    };
    let combo = pow(lam2, rho2)? - pow(lam2, rho1)? - pow(lam1, rho2)? + pow(lam1, rho1)?;
    let beta = trace_norm(&HermitianOperator::from_hermitian_part(combo)).min(T::one());

    let a = difference_operator(lam2, rho1, rho2, n)?;
    let b = difference_operator(lam1, rho1, rho2, n)?;
    let beta_sharp = (T::lit(0.5) * trace_norm(&(&a - &b))).min(T::one());
    Ok(Bounds { beta, beta_sharp })
}

/// Per-record summary of a distillation evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DistillationRecord<T: Scalar> {
    pub delta_d: T,
    pub delta_d_prime: T,
    pub beta: T,
    pub beta_sharp: T,
    /// `ΔD′ₙ / β`, NaN when `β = 0`.
    pub tightness: T,
    pub epsilon: T,
    pub n_copies: usize,
}

impl<T: Scalar> DistillationRecord<T> {
    pub fn new(delta_d: T, delta_d_prime: T, bounds: Bounds<T>, epsilon: T, n_copies: usize) -> Self {
        Self {
            delta_d,
            delta_d_prime,
            beta: bounds.beta,
            beta_sharp: bounds.beta_sharp,
            tightness: ratio(delta_d_prime, bounds.beta),
            epsilon,
            n_copies,
        }
    }
}

/// `num / den`, NaN when `den` is not positive.
pub fn ratio<T: Scalar>(num: T, den: T) -> T {
    if den > T::zero() {
        num / den
    } else {
        T::zero() / T::zero()
    }
}

/// Everything about one `(Λ₁, Λ₂, ρ₁, ρ₂, n)` problem that does not depend on
/// the coarse-graining unitary.
#[derive(Debug, Clone)]
pub struct DistillationInstance<T: Scalar> {
    pub lam1: PauliChannel<T>,
    pub lam2: PauliChannel<T>,
    pub rho1: HermitianOperator<T>,
    pub rho2: HermitianOperator<T>,
    pub dims: DilationDims,
    /// `Λ₂^{⊗n}(ρ₂^{⊗n} − ρ₁^{⊗n})`.
    pub a: HermitianOperator<T>,
    /// `Λ₁^{⊗n}(ρ₂^{⊗n} − ρ₁^{⊗n})`.
    pub b: HermitianOperator<T>,
    pub bounds: Bounds<T>,
    pub delta_d: T,
}

impl<T: Scalar> DistillationInstance<T> {
    pub fn new(
        lam1: PauliChannel<T>,
        lam2: PauliChannel<T>,
        rho1: HermitianOperator<T>,
        rho2: HermitianOperator<T>,
        dims: DilationDims,
    ) -> Result<Self> {
        let n = dims.n_copies;
        let a = difference_operator(&lam2, &rho1, &rho2, n)?;
        let b = difference_operator(&lam1, &rho1, &rho2, n)?;
        let bounds = general_bound(&lam1, &lam2, &rho1, &rho2, n)?;
        let delta_d = undistilled_delta_d(&lam1, &lam2, &rho1, &rho2)?;
        Ok(Self {
            lam1,
            lam2,
            rho1,
            rho2,
            dims,
            a,
            b,
            bounds,
            delta_d,
        })
    }

    /// Instance of the two-step model at noise `epsilon`.
    pub fn for_model(epsilon: T, rho1: HermitianOperator<T>, rho2: HermitianOperator<T>, dims: DilationDims) -> Result<Self> {
        let (lam1, lam2) = crate::channel::model_channels(epsilon)?;
        Self::new(lam1, lam2, rho1, rho2, dims)
    }

    /// `ΔD′ₙ` for the map with isometry `v`.
    pub fn evaluate_isometry(&self, v: &CMatrix<T>) -> T {
        let d = self.dims.dim_d;
        let la = output_trace_norm(&compress_hermitian(v, self.a.matrix(), d));
        let lb = output_trace_norm(&compress_hermitian(v, self.b.matrix(), d));
        T::lit(0.5) * (la - lb)
    }

    pub fn evaluate(&self, cg: &CoarseGrainer<T>) -> Result<T> {
        if cg.dims() != self.dims {
            return Err(Error::InvalidArgument(format!(
                "coarse-grainer dims {:?} do not match instance dims {:?}",
                cg.dims(),
                self.dims
            )));
        }
        Ok(self.evaluate_isometry(cg.isometry()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{computational_pair, model_channels};
    use crate::operator::max_abs;

    #[test]
    fn dims_validation() {
        assert!(DilationDims::new(0, 1, 2).is_err());
        assert!(DilationDims::new(1, 3, 2).is_err());
        let d = DilationDims::new(3, 2, 2).unwrap();
        assert_eq!((d.dim_m(), d.total()), (8, 32));
        assert_eq!(d.param_len(Parametrization::FullUnitary), 1024);
        assert_eq!(d.param_len(Parametrization::Isometry), 512);
    }

    #[test]
    fn identity_dilation_is_constant_map() {
        let dims = DilationDims::new(2, 2, 2).unwrap();
        let cg = CoarseGrainer::<f64>::identity_dilation(dims).unwrap();
        let psi = HermitianOperator::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4]);
        let out = coarse_grain(&cg, &psi).unwrap();
        let expected = HermitianOperator::<f64>::from_real_diagonal(&[1.0, 0.0]);
        assert!(max_abs(&(out.matrix() - expected.matrix())) < 1e-14);
    }

    #[test]
    fn swap_with_trivial_auxiliary_is_identity() {
        let dims = DilationDims::new(1, 1, 2).unwrap();
        let cg = CoarseGrainer::<f64>::swap(dims).unwrap();
        let psi = HermitianOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[cr(0.3), Complex::new(0.2, 0.1), Complex::new(0.2, -0.1), cr(0.7)],
        ))
        .unwrap();
        let out = coarse_grain(&cg, &psi).unwrap();
        assert!(max_abs(&(out.matrix() - psi.matrix())) < 1e-12);
        let literal = cg.coarse_grain_via_dilation(psi.matrix()).unwrap();
        assert!(max_abs(&(literal - psi.matrix())) < 1e-12);
    }

    #[test]
    fn swap_seed_isometry_matches_generator() {
        let dims = DilationDims::qubit_default(2).unwrap();
        let a = CoarseGrainer::<f64>::swap(dims).unwrap();
        let w = swap_seed::<f64>(&dims, Parametrization::Isometry).unwrap();
        let b = CoarseGrainer::from_isometry_params(dims, w).unwrap();
        assert!(max_abs(&(a.isometry() - b.isometry())) < 1e-12);
    }

    #[test]
    fn coarse_grain_rejects_wrong_dimension() {
        let dims = DilationDims::new(2, 2, 2).unwrap();
        let cg = CoarseGrainer::<f64>::identity_dilation(dims).unwrap();
        let psi = HermitianOperator::<f64>::identity(2);
        assert!(matches!(coarse_grain(&cg, &psi), Err(Error::DimensionMismatch { .. })));
        assert!(CoarseGrainer::<f64>::from_generator(dims, vec![0.0; 10]).is_err());
    }

    #[test]
    fn undistilled_examples() {
        let (rho1, rho2) = computational_pair::<f64>();
        let (l1, l2) = model_channels(0.1).unwrap();
        assert!((undistilled_delta_d(&l1, &l2, &rho1, &rho2).unwrap() + 0.12).abs() < 1e-12);
        let (l1, l2) = model_channels(0.3).unwrap();
        assert!((undistilled_delta_d(&l1, &l2, &rho1, &rho2).unwrap() - 0.12).abs() < 1e-12);
        let (l1, l2) = model_channels(0.0).unwrap();
        let mixed = HermitianOperator::from_real_diagonal(&[0.25, 0.75]);
        assert_eq!(undistilled_delta_d(&l1, &l2, &rho1, &mixed).unwrap(), 0.0);
    }

    #[test]
    fn distilled_examples() {
        let (rho1, rho2) = computational_pair::<f64>();
        let (l1, l2) = model_channels(0.3).unwrap();
        let dims = DilationDims::qubit_default(2).unwrap();
        let cg = CoarseGrainer::identity_dilation(dims).unwrap();
        assert!(distilled_delta_d(&cg, &l1, &l2, &rho1, &rho2).unwrap().abs() < 1e-14);

        for eps in [0.05, 0.2, 0.3, 0.45] {
            let (l1, l2) = model_channels(eps).unwrap();
            let cg = CoarseGrainer::swap(DilationDims::new(1, 1, 2).unwrap()).unwrap();
            let distilled = distilled_delta_d(&cg, &l1, &l2, &rho1, &rho2).unwrap();
            let plain = undistilled_delta_d(&l1, &l2, &rho1, &rho2).unwrap();
            assert!((distilled - plain).abs() < 1e-12, "eps {eps}");
        }

        let cg = CoarseGrainer::<f64>::identity_dilation(DilationDims::qubit_default(3).unwrap()).unwrap();
        assert!(distilled_delta_d(&cg, &l1, &l2, &rho1, &rho2).unwrap().abs() < 1e-14);
    }

    #[test]
    fn general_bound_examples() {
        let (rho1, rho2) = computational_pair::<f64>();
        let (l1, l2) = model_channels(0.3).unwrap();
        let b1 = general_bound(&l1, &l2, &rho1, &rho2, 1).unwrap();
        assert!((b1.beta - 0.24).abs() < 1e-12 && (b1.beta_sharp - 0.12).abs() < 1e-12);
        let b2 = general_bound(&l1, &l2, &rho1, &rho2, 2).unwrap();
        assert!((b2.beta - 0.24).abs() < 1e-12 && (b2.beta_sharp - 0.12).abs() < 1e-12);

        // Brute force over the diagonal 8×8 operator: Σ_s |a₁ s₁ + a₃ s₃| with
        // s₁ the sum of the three signs and s₃ their product.
        let (z1, z2) = (0.4f64, 0.52f64);
        let a1 = (z2 - z1) / 4.0;
        let a3 = (z2.powi(3) - z1.powi(3)) / 4.0;
        let mut brute = 0.0;
        for bits in 0..8u32 {
            let s: Vec<f64> = (0..3).map(|k| if bits >> k & 1 == 0 { 1.0 } else { -1.0 }).collect();
            brute += (a1 * (s[0] + s[1] + s[2]) + a3 * s[0] * s[1] * s[2]).abs();
        }
        let b3 = general_bound(&l1, &l2, &rho1, &rho2, 3).unwrap();
        assert!((b3.beta - brute).abs() < 1e-12);
        assert!((b3.beta - 0.283392).abs() < 1e-9);
        assert!((b3.beta_sharp - brute / 2.0).abs() < 1e-12);
    }

    #[test]
    fn record_tightness() {
        let r: DistillationRecord<f64> = DistillationRecord::new(
            -0.1,
            0.06,
            Bounds {
                beta: 0.24,
                beta_sharp: 0.12,
            },
            0.3,
            2,
        );
        assert!((r.tightness - 0.25).abs() < 1e-15);
        let r: DistillationRecord<f64> = DistillationRecord::new(0.0, 0.0, Bounds { beta: 0.0, beta_sharp: 0.0 }, 0.0, 1);
        assert!(r.tightness.is_nan());
    }

    #[test]
    fn instance_matches_direct_evaluation() {
        let (rho1, rho2) = computational_pair::<f64>();
        let dims = DilationDims::qubit_default(2).unwrap();
        let inst = DistillationInstance::for_model(0.3, rho1.clone(), rho2.clone(), dims).unwrap();
        let cg = CoarseGrainer::swap(dims).unwrap();
        let (l1, l2) = model_channels(0.3).unwrap();
        let direct = distilled_delta_d(&cg, &l1, &l2, &rho1, &rho2).unwrap();
        assert!((inst.evaluate(&cg).unwrap() - direct).abs() < 1e-14);
        assert!((direct - 0.12).abs() < 1e-12);
    }
}
