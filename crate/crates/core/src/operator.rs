//! Dense complex linear algebra shared by every other module: Hermitian
//! eigendecomposition, trace norm, tensor products, partial traces and the
//! Hermitian-generator parametrization of unitaries.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cr, CMatrix, Scalar};

/// Square complex matrix that equals its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T: Scalar> {
    entries: CMatrix<T>,
}

/// Largest entry of `|M - M†|`.
pub fn hermitian_deviation<T: Scalar>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).modulus();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

impl<T: Scalar> HermitianOperator<T> {
    /// Validates squareness and Hermiticity (max-entry tolerance `T::HERMITIAN_TOL`).
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidArgument("operator dimension must be >= 1".into()));
        }
        let deviation = hermitian_deviation(&entries);
        if !(deviation <= T::lit(T::HERMITIAN_TOL)) {
            return Err(Error::NotHermitian {
                deviation: deviation.to_f64_lossy(),
            });
        }
        Ok(Self { entries })
    }

    /// Wraps a matrix known to be Hermitian up to round-off, projecting it
    /// onto the Hermitian part so drift does not accumulate.
    pub(crate) fn from_hermitian_part(m: CMatrix<T>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        let half = T::lit(0.5);
        let adj = m.adjoint();
        let entries = (m + adj).map(|z| z * half);
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut entries = CMatrix::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            entries[(i, i)] = cr(T::lit(v));
        }
        Self { entries }
    }

    /// Builds `Σ_i w_i |v_i⟩⟨v_i|` from eigenvector columns.
    pub(crate) fn from_spectrum(vectors: &CMatrix<T>, weights: &[T]) -> Self {
        let n = vectors.nrows();
        let mut scaled = vectors.clone();
        for (j, &w) in weights.iter().enumerate() {
            let mut col = scaled.column_mut(j);
            col *= cr(w);
        }
        let m = &scaled * vectors.adjoint();
        debug_assert_eq!(m.nrows(), n);
        Self::from_hermitian_part(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.entries
    }

    /// Real part of the trace (the imaginary part vanishes for Hermitian input).
    pub fn trace(&self) -> T {
        self.entries.trace().re
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            entries: self.entries.map(|z| z * factor),
        }
    }

    /// `Tr(self · other)`, real for Hermitian operands.
    pub fn inner(&self, other: &Self) -> T {
        let mut acc = T::zero();
        let n = self.dim();
        for i in 0..n {
            for k in 0..n {
                acc += (self.entries[(i, k)] * other.entries[(k, i)]).re;
            }
        }
        acc
    }

    /// Eigenvalues in descending order with matching eigenvector columns.
    pub fn eigh(&self) -> (Vec<T>, CMatrix<T>) {
        let eig = SymmetricEigen::new(self.entries.clone());
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        (values, vectors)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        if self.dim() == 2 {
            let (hi, lo) = eigenvalues_2x2(&self.entries);
            return vec![hi, lo];
        }
        let mut v: Vec<T> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        v
    }

    pub fn min_eigenvalue(&self) -> T {
        *self.eigenvalues().last().expect("dimension >= 1")
    }
}

impl<T: Scalar> std::ops::Sub for &HermitianOperator<T> {
    type Output = HermitianOperator<T>;
    fn sub(self, rhs: Self) -> HermitianOperator<T> {
        HermitianOperator {
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl<T: Scalar> std::ops::Add for &HermitianOperator<T> {
    type Output = HermitianOperator<T>;
    fn add(self, rhs: Self) -> HermitianOperator<T> {
        HermitianOperator {
            entries: &self.entries + &rhs.entries,
        }
    }
}

#[inline]
fn eigenvalues_2x2<T: Scalar>(m: &CMatrix<T>) -> (T, T) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let radius = (diff * diff + b.norm_sqr()).sqrt();
    (mean + radius, mean - radius)
}

/// Trace norm of a 2×2 Hermitian matrix given as raw entries (no validation).
#[inline]
pub(crate) fn trace_norm_2x2<T: Scalar>(m: &CMatrix<T>) -> T {
    let (hi, lo) = eigenvalues_2x2(m);
    hi.abs() + lo.abs()
}

/// `‖M‖₁`: sum of absolute eigenvalues.
pub fn trace_norm<T: Scalar>(m: &HermitianOperator<T>) -> T {
    m.eigenvalues()
        .into_iter()
        .fold(T::zero(), |acc, v| acc + v.abs())
}

/// Jordan decomposition of a Hermitian operator together with the spectral
/// projectors onto its positive, negative and (numerical) null eigenspaces.
#[derive(Debug, Clone)]
pub struct SpectralSplit<T: Scalar> {
    pub delta_plus: HermitianOperator<T>,
    pub delta_minus: HermitianOperator<T>,
    pub p_plus: HermitianOperator<T>,
    pub p_minus: HermitianOperator<T>,
    pub p_zero: HermitianOperator<T>,
    /// Descending.
    pub eigenvalues: Vec<T>,
    /// Eigenvector columns matching `eigenvalues`.
    pub eigenvectors: CMatrix<T>,
    pub zero_tol: T,
}

impl<T: Scalar> SpectralSplit<T> {
    pub fn rank_plus(&self) -> usize {
        self.eigenvalues.iter().filter(|&&v| v > self.zero_tol).count()
    }

    pub fn rank_minus(&self) -> usize {
        self.eigenvalues.iter().filter(|&&v| v < -self.zero_tol).count()
    }

    pub fn rank_zero(&self) -> usize {
        self.eigenvalues.len() - self.rank_plus() - self.rank_minus()
    }

    /// Eigenvector columns spanning the kernel (|v| ≤ zero_tol).
    pub fn kernel_basis(&self) -> CMatrix<T> {
        let idx: Vec<usize> = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() <= self.zero_tol)
            .map(|(i, _)| i)
            .collect();
        let n = self.eigenvectors.nrows();
        let mut k = CMatrix::zeros(n, idx.len());
        for (dst, &src) in idx.iter().enumerate() {
            k.set_column(dst, &self.eigenvectors.column(src));
        }
        k
    }

    /// Eigenvalues that sit close to the kernel threshold, where the
    /// assignment to P₊/P₋/P₀ is numerically ambiguous.
    pub fn near_degenerate(&self) -> bool {
        let lo = self.zero_tol * T::lit(1e-2);
        let hi = self.zero_tol * T::lit(1e2);
        self.eigenvalues.iter().any(|v| {
            let a = v.abs();
            a > lo && a < hi
        })
    }
}

/// Splits `M = Δ₊ − Δ₋` and builds the spectral projectors. Eigenvalues with
/// `|v| ≤ zero_tol` are assigned to the kernel projector; Δ± keep every
/// eigenvalue of their sign so the reconstruction stays exact.
pub fn spectral_split<T: Scalar>(m: &HermitianOperator<T>, zero_tol: T) -> Result<SpectralSplit<T>> {
    if !(zero_tol > T::zero()) {
        return Err(Error::InvalidArgument("zero_tol must be positive".into()));
    }
    let (eigenvalues, eigenvectors) = m.eigh();
    let pick = |f: &dyn Fn(T) -> T| -> Vec<T> { eigenvalues.iter().map(|&v| f(v)).collect() };
    let one = T::one();
    let zero = T::zero();
    let delta_plus = HermitianOperator::from_spectrum(&eigenvectors, &pick(&|v| if v > zero { v } else { zero }));
    let delta_minus = HermitianOperator::from_spectrum(&eigenvectors, &pick(&|v| if v < zero { -v } else { zero }));
    let p_plus = HermitianOperator::from_spectrum(&eigenvectors, &pick(&|v| if v > zero_tol { one } else { zero }));
    let p_minus = HermitianOperator::from_spectrum(&eigenvectors, &pick(&|v| if v < -zero_tol { one } else { zero }));
    let p_zero = HermitianOperator::from_spectrum(&eigenvectors, &pick(&|v| if v.abs() <= zero_tol { one } else { zero }));
    Ok(SpectralSplit {
        delta_plus,
        delta_minus,
        p_plus,
        p_minus,
        p_zero,
        eigenvalues,
        eigenvectors,
        zero_tol,
    })
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// `M^{⊗n}`.
pub fn tensor_power<T: Scalar>(m: &CMatrix<T>, n: usize) -> Result<CMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("tensor power requires n >= 1".into()));
    }
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let mut out = m.clone();
    for _ in 1..n {
        out = kron(&out, m);
    }
    Ok(out)
}

/// Traces out every factor not listed in `keep`. Factors are ordered as in
/// the Kronecker product (first factor most significant); the kept factors
/// appear in the output in their original relative order.
pub fn partial_trace<T: Scalar>(m: &CMatrix<T>, factor_dims: &[usize], keep: &[usize]) -> Result<CMatrix<T>> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if factor_dims.contains(&0) {
        return Err(Error::InvalidArgument("factor dimensions must be positive".into()));
    }
    let total: usize = factor_dims.iter().product();
    if total != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: m.nrows(),
        });
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep must name at least one factor".into()));
    }
    let mut kept = vec![false; factor_dims.len()];
    for &k in keep {
        if k >= factor_dims.len() {
            return Err(Error::InvalidArgument(format!(
                "factor index {k} out of range for {} factors",
                factor_dims.len()
            )));
        }
        if kept[k] {
            return Err(Error::InvalidArgument(format!("factor index {k} listed twice")));
        }
        kept[k] = true;
    }
    let kept_dims: Vec<usize> = (0..factor_dims.len()).filter(|&i| kept[i]).map(|i| factor_dims[i]).collect();
    let traced_dims: Vec<usize> = (0..factor_dims.len()).filter(|&i| !kept[i]).map(|i| factor_dims[i]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // Row-major strides of the full index.
    let mut strides = vec![1usize; factor_dims.len()];
    for i in (0..factor_dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * factor_dims[i + 1];
    }
    let kept_strides: Vec<usize> = (0..factor_dims.len()).filter(|&i| kept[i]).map(|i| strides[i]).collect();
    let traced_strides: Vec<usize> = (0..factor_dims.len()).filter(|&i| !kept[i]).map(|i| strides[i]).collect();

    let offset = |index: usize, dims: &[usize], strides: &[usize]| -> usize {
        let mut rem = index;
        let mut acc = 0;
        for k in (0..dims.len()).rev() {
            acc += (rem % dims[k]) * strides[k];
            rem /= dims[k];
        }
        acc
    };
    let kept_offsets: Vec<usize> = (0..out_dim).map(|i| offset(i, &kept_dims, &kept_strides)).collect();
    let traced_offsets: Vec<usize> = (0..traced_total).map(|i| offset(i, &traced_dims, &traced_strides)).collect();

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for (i, &oi) in kept_offsets.iter().enumerate() {
        for (j, &oj) in kept_offsets.iter().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &t in &traced_offsets {
                acc += m[(oi + t, oj + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Hermitian matrix `H(θ)` for a generator vector of length `N²`.
///
/// Basis ordering:
/// - `θ[0..N]` are the real diagonal entries `H_jj`;
/// - the next `N(N−1)/2` entries are `Re H_jk` for `j < k`, pairs enumerated
///   row-major (`(0,1), (0,2), …, (0,N−1), (1,2), …`);
/// - the last `N(N−1)/2` entries are `Im H_jk` in the same pair order.
///
/// `H_kj = conj(H_jk)`.
pub fn hermitian_from_generator<T: Scalar>(theta: &[T], n: usize) -> Result<HermitianOperator<T>> {
    if theta.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: theta.len(),
        });
    }
    let pairs = n * (n.saturating_sub(1)) / 2;
    let mut h = CMatrix::zeros(n, n);
    for j in 0..n {
        h[(j, j)] = cr(theta[j]);
    }
    let mut p = 0;
    for j in 0..n {
        for k in (j + 1)..n {
            let z = Complex::new(theta[n + p], theta[n + pairs + p]);
            h[(j, k)] = z;
            h[(k, j)] = z.conj();
            p += 1;
        }
    }
    Ok(HermitianOperator { entries: h })
}

/// Inverse of [`hermitian_from_generator`].
pub fn generator_from_hermitian<T: Scalar>(h: &HermitianOperator<T>) -> Vec<T> {
    let n = h.dim();
    let pairs = n * (n - 1) / 2;
    let mut theta = vec![T::zero(); n * n];
    let m = h.matrix();
    for j in 0..n {
        theta[j] = m[(j, j)].re;
    }
    let mut p = 0;
    for j in 0..n {
        for k in (j + 1)..n {
            theta[n + p] = m[(j, k)].re;
            theta[n + pairs + p] = m[(j, k)].im;
            p += 1;
        }
    }
    theta
}

/// `exp(iH)` through the eigendecomposition of `H`.
pub fn exp_i_hermitian<T: Scalar>(h: &HermitianOperator<T>) -> CMatrix<T> {
    let (values, vectors) = h.eigh();
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let phase = Complex::new(v.cos(), v.sin());
        let mut col = scaled.column_mut(j);
        col *= phase;
    }
    &scaled * vectors.adjoint()
}

/// `U = exp(iH(θ))` for the generator basis of [`hermitian_from_generator`].
pub fn unitary_from_generator<T: Scalar>(theta: &[T], n: usize) -> Result<CMatrix<T>> {
    let h = hermitian_from_generator(theta, n)?;
    Ok(exp_i_hermitian(&h))
}

/// Max-entry deviation of `U†U` from the identity.
pub fn unitarity_defect<T: Scalar>(u: &CMatrix<T>) -> T {
    let prod = u.adjoint() * u;
    let n = prod.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { T::one() } else { T::zero() };
            let d = (prod[(i, j)] - cr(target)).modulus();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Largest entry modulus.
pub fn max_abs<T: Scalar>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| {
        let a = z.modulus();
        if a > acc {
            a
        } else {
            acc
        }
    })
}
