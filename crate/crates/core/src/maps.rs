//! Linear maps between operator spaces and their Choi-matrix diagnostics.

use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::operator::{partial_trace, HermitianOperator};
use crate::scalar::{cr, CMatrix, Scalar};

/// Linear map `B(C^in) → B(C^out)`.
pub trait QuantumMap<T: Scalar> {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;

    /// Applies the map to an arbitrary (not necessarily Hermitian) operator.
    fn apply_matrix(&self, x: &CMatrix<T>) -> Result<CMatrix<T>>;

    fn apply(&self, x: &HermitianOperator<T>) -> Result<HermitianOperator<T>> {
        Ok(HermitianOperator::from_hermitian_part(self.apply_matrix(x.matrix())?))
    }
}

pub(crate) fn check_input_dim<T: Scalar>(expected: usize, x: &CMatrix<T>) -> Result<()> {
    if x.nrows() != expected || x.ncols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.nrows().max(x.ncols()),
        });
    }
    Ok(())
}

/// Unnormalized Choi matrix `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` (input factor first).
pub fn choi_matrix<T: Scalar, M: QuantumMap<T> + ?Sized>(map: &M) -> Result<CMatrix<T>> {
    let din = map.input_dim();
    let dout = map.output_dim();
    let mut j = CMatrix::zeros(din * dout, din * dout);
    for a in 0..din {
        for b in 0..din {
            let mut e = CMatrix::zeros(din, din);
            e[(a, b)] = cr(T::one());
            let img = map.apply_matrix(&e)?;
            for r in 0..dout {
                for s in 0..dout {
                    j[(a * dout + r, b * dout + s)] = img[(r, s)];
                }
            }
        }
    }
    Ok(j)
}

/// Complete-positivity and trace-preservation diagnostics of a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpDiagnostics<T: Scalar> {
    /// Smallest eigenvalue of the Choi matrix.
    pub choi_min_eigenvalue: T,
    /// Max-entry deviation of `Tr_out J` from the identity.
    pub trace_defect: T,
}

impl<T: Scalar> CptpDiagnostics<T> {
    pub fn is_cptp(&self, psd_tol: T, tp_tol: T) -> bool {
        self.choi_min_eigenvalue >= -psd_tol && self.trace_defect <= tp_tol
    }
}

pub fn cptp_diagnostics<T: Scalar, M: QuantumMap<T> + ?Sized>(map: &M) -> Result<CptpDiagnostics<T>> {
    let j = choi_matrix(map)?;
    let herm = HermitianOperator::from_hermitian_part(j.clone());
    let choi_min_eigenvalue = herm.min_eigenvalue();
    let reduced = partial_trace(&j, &[map.input_dim(), map.output_dim()], &[0])?;
    let n = reduced.nrows();
    let mut trace_defect = T::zero();
    for a in 0..n {
        for b in 0..n {
            let target = if a == b { T::one() } else { T::zero() };
            let d = (reduced[(a, b)] - cr(target)).modulus();
            if d > trace_defect {
                trace_defect = d;
            }
        }
    }
    Ok(CptpDiagnostics {
        choi_min_eigenvalue,
        trace_defect,
    })
}

/// Identity channel on `C^dim`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityMap {
    pub dim: usize,
}

impl<T: Scalar> QuantumMap<T> for IdentityMap {
    fn input_dim(&self) -> usize {
        self.dim
    }
    fn output_dim(&self) -> usize {
        self.dim
    }
    fn apply_matrix(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_input_dim(self.dim, x)?;
        Ok(x.clone())
    }
}

/// `X ↦ Tr(X) · I/d`.
#[derive(Debug, Clone, Copy)]
pub struct CompletelyDepolarizing {
    pub input_dim: usize,
    pub output_dim: usize,
}

impl<T: Scalar> QuantumMap<T> for CompletelyDepolarizing {
    fn input_dim(&self) -> usize {
        self.input_dim
    }
    fn output_dim(&self) -> usize {
        self.output_dim
    }
    fn apply_matrix(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_input_dim(self.input_dim, x)?;
        let scale = T::one() / T::lit(self.output_dim as f64);
        let t = x.trace() * cr(scale);
        Ok(CMatrix::from_diagonal_element(self.output_dim, self.output_dim, t))
    }
}

/// Map given by Kraus operators `X ↦ Σ K X K†`.
#[derive(Debug, Clone)]
pub struct KrausMap<T: Scalar> {
    kraus: Vec<CMatrix<T>>,
    input_dim: usize,
    output_dim: usize,
}

impl<T: Scalar> KrausMap<T> {
    pub fn new(kraus: Vec<CMatrix<T>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("at least one Kraus operator required".into()))?;
        let (output_dim, input_dim) = first.shape();
        if kraus.iter().any(|k| k.shape() != (output_dim, input_dim)) {
            return Err(Error::InvalidChannel("Kraus operators must share one shape".into()));
        }
        Ok(Self {
            kraus,
            input_dim,
            output_dim,
        })
    }

    /// Kraus form of a Stinespring isometry `V: C^in → C^(env·out)` with the
    /// output factor last.
    pub fn from_isometry(v: &CMatrix<T>, output_dim: usize) -> Result<Self> {
        if output_dim == 0 || !v.nrows().is_multiple_of(output_dim) {
            return Err(Error::DimensionMismatch {
                expected: output_dim,
                found: v.nrows(),
            });
        }
        let env = v.nrows() / output_dim;
        let kraus = (0..env).map(|e| v.rows(e * output_dim, output_dim).into_owned()).collect();
        Self::new(kraus)
    }

    pub fn kraus(&self) -> &[CMatrix<T>] {
        &self.kraus
    }

    /// `Σ K†K`, the identity for a trace-preserving map.
    pub fn completeness(&self) -> CMatrix<T> {
        let mut acc = CMatrix::zeros(self.input_dim, self.input_dim);
        for k in &self.kraus {
            acc += k.adjoint() * k;
        }
        acc
    }
}

impl<T: Scalar> QuantumMap<T> for KrausMap<T> {
    fn input_dim(&self) -> usize {
        self.input_dim
    }
    fn output_dim(&self) -> usize {
        self.output_dim
    }
    fn apply_matrix(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_input_dim(self.input_dim, x)?;
        let mut out = CMatrix::from_element(self.output_dim, self.output_dim, Complex::new(T::zero(), T::zero()));
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        Ok(out)
    }
}
