//! Floating point scalar abstraction.
//!
//! All numerical modules are generic over [`Scalar`], implemented for `f32`
//! and `f64`. Tolerances are attached to the scalar type because the
//! double-precision contracts (1e-12 Hermiticity, 1e-10 invariants) are not
//! reachable in single precision.

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Real scalar the library computes in: f32 or f64.
pub trait Scalar: RealField + Copy + ToPrimitive + serde::Serialize + serde::de::DeserializeOwned {
    /// Max-entry deviation from Hermiticity accepted by [`crate::HermitianOperator`].
    const HERMITIAN_TOL: f64;
    /// Default kernel threshold for spectral splits.
    const ZERO_TOL: f64;
    /// Tolerance for derived invariants (traces, projector identities, CPTP checks).
    const CHECK_TOL: f64;

    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const HERMITIAN_TOL: f64 = 1e-12;
    const ZERO_TOL: f64 = 1e-9;
    const CHECK_TOL: f64 = 1e-10;
}

impl Scalar for f32 {
    const HERMITIAN_TOL: f64 = 1e-5;
    const ZERO_TOL: f64 = 1e-4;
    const CHECK_TOL: f64 = 1e-4;
}

/// Dense complex matrix over a [`Scalar`].
pub type CMatrix<T> = DMatrix<Complex<T>>;

#[inline]
pub(crate) fn c<T: Scalar>(re: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::zero())
}

#[inline]
pub(crate) fn cr<T: Scalar>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}
