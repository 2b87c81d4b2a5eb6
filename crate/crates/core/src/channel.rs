//! Pauli qubit channels, the two-step dephasing/bit-flip model, the
//! intermediate map between its steps and the regime classifier.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, PauliAxis, Result};
use crate::maps::{check_input_dim, cptp_diagnostics, QuantumMap};
use crate::operator::{kron, tensor_power, HermitianOperator};
use crate::scalar::{c, CMatrix, Scalar};

/// Single-qubit Pauli matrix.
pub fn pauli<T: Scalar>(axis: Option<PauliAxis>) -> CMatrix<T> {
    let z0 = c::<T>(0.0);
    let one = c::<T>(1.0);
    match axis {
        None => CMatrix::identity(2, 2),
        Some(PauliAxis::X) => CMatrix::from_row_slice(2, 2, &[z0, one, one, z0]),
        Some(PauliAxis::Y) => {
            let i = Complex::new(T::zero(), T::one());
            CMatrix::from_row_slice(2, 2, &[z0, -i, i, z0])
        }
        Some(PauliAxis::Z) => CMatrix::from_row_slice(2, 2, &[one, z0, z0, -one]),
    }
}

/// `I ⊗ … ⊗ P ⊗ … ⊗ I` with `P` on `site` of `n` qubits (site 0 is the
/// most significant factor).
pub fn embed_pauli<T: Scalar>(axis: Option<PauliAxis>, site: usize, n: usize) -> CMatrix<T> {
    let mut out = CMatrix::identity(1, 1);
    for j in 0..n {
        let factor = if j == site { pauli(axis) } else { pauli(None) };
        out = kron(&out, &factor);
    }
    out
}

/// Qubit channel `ρ ↦ p_I ρ + p_x XρX + p_y YρY + p_z ZρZ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PauliChannel<T: Scalar> {
    pub p_identity: T,
    pub p_x: T,
    pub p_y: T,
    pub p_z: T,
}

impl<T: Scalar> PauliChannel<T> {
    pub fn new(p_identity: T, p_x: T, p_y: T, p_z: T) -> Result<Self> {
        let tol = T::lit(T::HERMITIAN_TOL);
        let weights = [p_identity, p_x, p_y, p_z];
        if weights.iter().any(|&w| !(w >= -tol)) {
            return Err(Error::InvalidChannel(format!(
                "Pauli weights must be non-negative, got {:?}",
                weights.map(|w| w.to_f64_lossy())
            )));
        }
        let sum = p_identity + p_x + p_y + p_z;
        if !((sum - T::one()).abs() <= tol) {
            return Err(Error::InvalidChannel(format!(
                "Pauli weights must sum to 1, got {}",
                sum.to_f64_lossy()
            )));
        }
        Ok(Self {
            p_identity,
            p_x,
            p_y,
            p_z,
        })
    }

    pub fn identity() -> Self {
        Self {
            p_identity: T::one(),
            p_x: T::zero(),
            p_y: T::zero(),
            p_z: T::zero(),
        }
    }

    /// Builds the channel with the given transfer eigenvalues `(λ_x, λ_y, λ_z)`;
    /// fails if the implied weights are not a probability vector.
    pub fn from_transfer(lx: T, ly: T, lz: T) -> Result<Self> {
        let q = T::lit(0.25);
        let one = T::one();
        Self::new(
            (one + lx + ly + lz) * q,
            (one + lx - ly - lz) * q,
            (one - lx + ly - lz) * q,
            (one - lx - ly + lz) * q,
        )
    }

    pub fn weights(&self) -> [T; 4] {
        [self.p_identity, self.p_x, self.p_y, self.p_z]
    }

    /// `(λ_x, λ_y, λ_z)`: the channel scales the Bloch components by these.
    pub fn transfer_eigenvalues(&self) -> [T; 3] {
        let (pi, px, py, pz) = (self.p_identity, self.p_x, self.p_y, self.p_z);
        [pi - pz + px - py, pi - pz - px + py, pi + pz - px - py]
    }
}

impl<T: Scalar> QuantumMap<T> for PauliChannel<T> {
    fn input_dim(&self) -> usize {
        2
    }
    fn output_dim(&self) -> usize {
        2
    }
    fn apply_matrix(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_input_dim(2, x)?;
        let mut out = x.map(|z| z * self.p_identity);
        for (w, axis) in [(self.p_x, PauliAxis::X), (self.p_y, PauliAxis::Y), (self.p_z, PauliAxis::Z)] {
            if w != T::zero() {
                let p = pauli::<T>(Some(axis));
                out += (&p * x * &p).map(|z| z * w);
            }
        }
        Ok(out)
    }
}

/// The model's first and second step for noise parameter `ε ∈ [0, 0.5]`:
/// `Λ₁ = (1−2ε)ρ + ε(ZρZ + XρX)` and
/// `Λ₂ = [(1−2ε)² + 4ε²]ρ + 2ε(1−2ε)(ZρZ + XρX)`.
pub fn model_channels<T: Scalar>(epsilon: T) -> Result<(PauliChannel<T>, PauliChannel<T>)> {
    if !(epsilon >= T::zero() && epsilon <= T::lit(0.5)) {
        return Err(Error::EpsilonOutOfRange(epsilon.to_f64_lossy()));
    }
    let two = T::lit(2.0);
    let a = T::one() - two * epsilon;
    let lam1 = PauliChannel::new(a, epsilon, T::zero(), epsilon)?;
    let mix = two * epsilon * a;
    let lam2 = PauliChannel::new(a * a + T::lit(4.0) * epsilon * epsilon, mix, T::zero(), mix)?;
    Ok((lam1, lam2))
}

/// Applies a Pauli channel to a single-qubit operator.
pub fn apply_channel<T: Scalar>(ch: &PauliChannel<T>, rho: &HermitianOperator<T>) -> Result<HermitianOperator<T>> {
    ch.apply(rho)
}

/// `ch^{⊗n}` on a `2ⁿ`-dimensional operator.
pub fn apply_channel_power<T: Scalar>(
    ch: &PauliChannel<T>,
    m: &HermitianOperator<T>,
    n: usize,
) -> Result<HermitianOperator<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("copy number must be >= 1".into()));
    }
    let dim = 1usize << n;
    check_input_dim(dim, m.matrix())?;
    let mut cur = m.matrix().clone();
    let terms = [
        (ch.p_x, PauliAxis::X),
        (ch.p_y, PauliAxis::Y),
        (ch.p_z, PauliAxis::Z),
    ];
    for site in 0..n {
        let mut next = cur.map(|z| z * ch.p_identity);
        for &(w, axis) in &terms {
            if w != T::zero() {
                let p = embed_pauli::<T>(Some(axis), site, n);
                next += (&p * &cur * &p).map(|z| z * w);
            }
        }
        cur = next;
    }
    Ok(HermitianOperator::from_hermitian_part(cur))
}

/// Unital Pauli-diagonal qubit map with transfer eigenvalues `(v_x, v_y, v_z)`.
/// It need not be positive; it is what `Λ₂ ∘ Λ₁⁻¹` looks like for Pauli channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDiagonalMap<T: Scalar> {
    pub transfer: [T; 3],
}

impl<T: Scalar> QuantumMap<T> for PauliDiagonalMap<T> {
    fn input_dim(&self) -> usize {
        2
    }
    fn output_dim(&self) -> usize {
        2
    }
    fn apply_matrix(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_input_dim(2, x)?;
        // Expand in the Pauli basis: x = ½(a I + Σ_k b_k σ_k), b_k = Tr(σ_k x).
        let half = T::lit(0.5);
        let mut out = pauli::<T>(None).map(|z| z * x.trace() * half);
        for (k, axis) in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z].into_iter().enumerate() {
            let p = pauli::<T>(Some(axis));
            let b = (&p * x).trace();
            out += p.map(|z| z * b * half * self.transfer[k]);
        }
        Ok(out)
    }
}

/// `Λ₂,₁ = Λ₂ ∘ Λ₁⁻¹` with its positivity and complete-positivity verdicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermediateMap<T: Scalar> {
    pub transfer_eigenvalues: [T; 3],
    pub is_positive: bool,
    pub is_cp: bool,
    pub choi_min_eigenvalue: T,
}

impl<T: Scalar> IntermediateMap<T> {
    pub fn as_map(&self) -> PauliDiagonalMap<T> {
        PauliDiagonalMap {
            transfer: self.transfer_eigenvalues,
        }
    }
}

pub fn intermediate_map<T: Scalar>(lam1: &PauliChannel<T>, lam2: &PauliChannel<T>) -> Result<IntermediateMap<T>> {
    let l1 = lam1.transfer_eigenvalues();
    let l2 = lam2.transfer_eigenvalues();
    let axes = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    let singular = T::lit(1e-12);
    let mut v = [T::zero(); 3];
    for k in 0..3 {
        if !(l1[k].abs() > singular) {
            return Err(Error::NonInvertible { axis: axes[k] });
        }
        v[k] = l2[k] / l1[k];
    }
    let pos_tol = T::lit(1e-10);
    let is_positive = v.iter().all(|x| x.abs() <= T::one() + pos_tol);
    let map = PauliDiagonalMap { transfer: v };
    let diag = cptp_diagnostics(&map)?;
    let is_cp = diag.choi_min_eigenvalue >= -pos_tol;
    Ok(IntermediateMap {
        transfer_eigenvalues: v,
        is_positive,
        is_cp,
        choi_min_eigenvalue: diag.choi_min_eigenvalue,
    })
}

/// Divisibility class of the two-step evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegimeLabel {
    Markovian,
    Weak,
    Essential,
}

impl RegimeLabel {
    pub fn from_map<T: Scalar>(map: &IntermediateMap<T>) -> Self {
        if map.is_cp {
            RegimeLabel::Markovian
        } else if map.is_positive {
            RegimeLabel::Weak
        } else {
            RegimeLabel::Essential
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::Markovian => "MARKOVIAN",
            RegimeLabel::Weak => "WEAK",
            RegimeLabel::Essential => "ESSENTIAL",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_regime<T: Scalar>(epsilon: T) -> Result<RegimeLabel> {
    let (lam1, lam2) = model_channels(epsilon)?;
    Ok(RegimeLabel::from_map(&intermediate_map(&lam1, &lam2)?))
}

/// Checks that `rho` is a qubit-or-larger density matrix: unit trace and PSD
/// within `T::CHECK_TOL`.
pub fn validate_state<T: Scalar>(rho: &HermitianOperator<T>) -> Result<()> {
    let tol = T::lit(T::CHECK_TOL);
    let tr = rho.trace();
    if !((tr - T::one()).abs() <= tol) {
        return Err(Error::InvalidState(format!("trace {} != 1", tr.to_f64_lossy())));
    }
    let min = rho.min_eigenvalue();
    if !(min >= -tol) {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {}",
            min.to_f64_lossy()
        )));
    }
    Ok(())
}

/// `ch^{⊗n}(ρ₂^{⊗n} − ρ₁^{⊗n})`.
pub fn difference_operator<T: Scalar>(
    ch: &PauliChannel<T>,
    rho1: &HermitianOperator<T>,
    rho2: &HermitianOperator<T>,
    n: usize,
) -> Result<HermitianOperator<T>> {
    for rho in [rho1, rho2] {
        check_input_dim(2, rho.matrix())?;
        validate_state(rho)?;
    }
    if n == 0 {
        return Err(Error::InvalidArgument("copy number must be >= 1".into()));
    }
    let diff = tensor_power(rho2.matrix(), n)? - tensor_power(rho1.matrix(), n)?;
    apply_channel_power(ch, &HermitianOperator::from_hermitian_part(diff), n)
}

/// The pair `(ρ₁, ρ₂) = (|1⟩⟨1|, |0⟩⟨0|)`.
pub fn computational_pair<T: Scalar>() -> (HermitianOperator<T>, HermitianOperator<T>) {
    (
        HermitianOperator::from_real_diagonal(&[0.0, 1.0]),
        HermitianOperator::from_real_diagonal(&[1.0, 0.0]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn model_channel_weights() {
        let (l1, l2) = model_channels(0.0f64).unwrap();
        assert_eq!(l1.weights(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(l2.weights(), [1.0, 0.0, 0.0, 0.0]);

        let (l1, l2) = model_channels(0.25f64).unwrap();
        for (a, b) in l1.weights().iter().zip([0.5, 0.25, 0.0, 0.25]) {
            assert!(close(*a, b, 1e-15));
        }
        for (a, b) in l2.weights().iter().zip([0.5, 0.25, 0.0, 0.25]) {
            assert!(close(*a, b, 1e-15));
        }

        let (l1, l2) = model_channels(0.1f64).unwrap();
        for (a, b) in l1.transfer_eigenvalues().iter().zip([0.8, 0.6, 0.8]) {
            assert!(close(*a, b, 1e-12));
        }
        for (a, b) in l2.transfer_eigenvalues().iter().zip([0.68, 0.36, 0.68]) {
            assert!(close(*a, b, 1e-12));
        }
        let eps = 0.1;
        assert!(close(l2.transfer_eigenvalues()[2], 1.0 - 4.0 * eps + 8.0 * eps * eps, 1e-12));
    }

    #[test]
    fn model_channels_domain() {
        assert!(matches!(model_channels(-0.01f64), Err(Error::EpsilonOutOfRange(_))));
        assert!(matches!(model_channels(0.51f64), Err(Error::EpsilonOutOfRange(_))));
        assert!(model_channels(f64::NAN).is_err());
        assert!(model_channels(0.5f64).is_ok());
    }

    #[test]
    fn pauli_channel_validation() {
        assert!(PauliChannel::new(0.5f64, 0.5, 0.1, 0.0).is_err());
        assert!(PauliChannel::new(1.1f64, -0.1, 0.0, 0.0).is_err());
        let ch = PauliChannel::from_transfer(0.3f64, -0.2, 0.5).unwrap();
        let t = ch.transfer_eigenvalues();
        assert!(close(t[0], 0.3, 1e-15) && close(t[1], -0.2, 1e-15) && close(t[2], 0.5, 1e-15));
        assert!(PauliChannel::from_transfer(1.0f64, 1.0, -1.0).is_err());
    }

    #[test]
    fn apply_channel_examples() {
        let (l1, l2) = model_channels(0.1f64).unwrap();
        let ket0 = HermitianOperator::<f64>::from_real_diagonal(&[1.0, 0.0]);
        let out1 = apply_channel(&l1, &ket0).unwrap();
        let exp1 = HermitianOperator::<f64>::from_real_diagonal(&[0.9, 0.1]);
        assert!(max_abs(&(out1.matrix() - exp1.matrix())) < 1e-14);
        let out2 = apply_channel(&l2, &ket0).unwrap();
        let exp2 = HermitianOperator::<f64>::from_real_diagonal(&[0.84, 0.16]);
        assert!(max_abs(&(out2.matrix() - exp2.matrix())) < 1e-14);

        let rho = HermitianOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.6), Complex::new(0.2, -0.1), Complex::new(0.2, 0.1), c(0.4)],
        ))
        .unwrap();
        let same = apply_channel(&PauliChannel::identity(), &rho).unwrap();
        assert_eq!(same, rho);

        let big = HermitianOperator::<f64>::identity(4);
        assert!(matches!(apply_channel(&l1, &big), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn apply_channel_power_two_copies() {
        let eps = 0.3f64;
        let (l1, _) = model_channels(eps).unwrap();
        let m = HermitianOperator::<f64>::from_real_diagonal(&[1.0, 0.0, 0.0, -1.0]);
        let out = apply_channel_power(&l1, &m, 2).unwrap();
        let z1 = 0.4;
        let zi = embed_pauli::<f64>(Some(PauliAxis::Z), 0, 2);
        let iz = embed_pauli::<f64>(Some(PauliAxis::Z), 1, 2);
        let expected = (zi + iz).map(|z| z * (z1 / 2.0));
        assert!(max_abs(&(out.matrix() - expected)) < 1e-14);
    }

    #[test]
    fn apply_channel_power_single_copy_matches_apply_channel() {
        let (l1, _) = model_channels(0.17f64).unwrap();
        let rho = HermitianOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.3), Complex::new(0.1, 0.25), Complex::new(0.1, -0.25), c(0.7)],
        ))
        .unwrap();
        let a = apply_channel_power(&l1, &rho, 1).unwrap();
        let b = apply_channel(&l1, &rho).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-15);
        assert!(apply_channel_power(&l1, &rho, 2).is_err());
    }

    #[test]
    fn intermediate_map_examples() {
        let (l1, l2) = model_channels(0.1f64).unwrap();
        let m = intermediate_map(&l1, &l2).unwrap();
        for (a, b) in m.transfer_eigenvalues.iter().zip([0.85, 0.6, 0.85]) {
            assert!(close(*a, b, 1e-12));
        }
        assert!(m.is_positive);
        assert!(!m.is_cp);
        // Choi eigenvalues are twice the implied Pauli weights; the Y weight is
        // (1 − 0.85 + 0.6 − 0.85)/4 = −0.025.
        assert!(close(m.choi_min_eigenvalue, -0.05, 1e-12));

        let (l1, l2) = model_channels(0.3f64).unwrap();
        let m = intermediate_map(&l1, &l2).unwrap();
        assert!(close(m.transfer_eigenvalues[0], 1.3, 1e-12));
        assert!(!m.is_positive);

        let m = intermediate_map(&l1, &l1).unwrap();
        assert_eq!(m.transfer_eigenvalues, [1.0, 1.0, 1.0]);
        assert!(m.is_cp && m.is_positive);
    }

    #[test]
    fn intermediate_map_singular_points() {
        let (l1, l2) = model_channels(0.25f64).unwrap();
        assert_eq!(
            intermediate_map(&l1, &l2),
            Err(Error::NonInvertible { axis: PauliAxis::Y })
        );
        let (l1, l2) = model_channels(0.5f64).unwrap();
        assert_eq!(
            intermediate_map(&l1, &l2),
            Err(Error::NonInvertible { axis: PauliAxis::X })
        );
        assert!(classify_regime(0.25f64).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_regime(0.1f64).unwrap(), RegimeLabel::Weak);
        assert_eq!(classify_regime(0.3f64).unwrap(), RegimeLabel::Essential);
        assert_eq!(classify_regime(0.0f64).unwrap(), RegimeLabel::Markovian);
        assert_eq!(classify_regime(0.1f32).unwrap(), RegimeLabel::Weak);
    }

    #[test]
    fn difference_operator_examples() {
        let (rho1, rho2) = computational_pair::<f64>();
        let (l1, _) = model_channels(0.1f64).unwrap();
        let zero = difference_operator(&l1, &rho1, &rho1, 2).unwrap();
        assert!(max_abs(zero.matrix()) == 0.0);

        let d = difference_operator(&l1, &rho1, &rho2, 1).unwrap();
        let expected = pauli::<f64>(Some(PauliAxis::Z)).map(|z| z * 0.8);
        assert!(max_abs(&(d.matrix() - expected)) < 1e-14);

        let (_, l2) = model_channels(0.3f64).unwrap();
        let d = difference_operator(&l2, &rho1, &rho2, 2).unwrap();
        let zi = embed_pauli::<f64>(Some(PauliAxis::Z), 0, 2);
        let iz = embed_pauli::<f64>(Some(PauliAxis::Z), 1, 2);
        let expected = (zi + iz).map(|z| z * 0.26);
        assert!(max_abs(&(d.matrix() - expected)) < 1e-14);
        assert!(d.trace().abs() < 1e-12);
    }

    #[test]
    fn difference_operator_rejects_invalid_states() {
        let (l1, _) = model_channels(0.1f64).unwrap();
        let bad = HermitianOperator::<f64>::from_real_diagonal(&[1.2, -0.2]);
        let good = HermitianOperator::<f64>::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(difference_operator(&l1, &bad, &good, 1), Err(Error::InvalidState(_))));
        let unnormalized = HermitianOperator::<f64>::from_real_diagonal(&[0.5, 0.4]);
        assert!(difference_operator(&l1, &good, &unnormalized, 1).is_err());
    }
}
