//! Random state-pair ensembles.
//!
//! Mixed states follow the Hilbert–Schmidt measure (`GG†/Tr GG†` with a
//! complex Ginibre `G`), pure states are normalized complex Gaussian vectors
//! (Haar), and orthogonal pairs are the two columns of a Haar unitary.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::mix_seed;
use crate::operator::HermitianOperator;
use crate::scalar::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EnsembleKind {
    Mixed,
    RandomPure,
    OrthogonalPure,
}

impl EnsembleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnsembleKind::Mixed => "MIXED",
            EnsembleKind::RandomPure => "RANDOM_PURE",
            EnsembleKind::OrthogonalPure => "ORTHOGONAL_PURE",
        }
    }

    /// Sampling measure, as recorded in export metadata.
    pub fn measure(&self) -> &'static str {
        match self {
            EnsembleKind::Mixed => "Hilbert-Schmidt: rho = G G^dag / Tr(G G^dag), G 2x2 complex standard Gaussian",
            EnsembleKind::RandomPure => "Haar: independent normalized complex standard Gaussian vectors",
            EnsembleKind::OrthogonalPure => "Haar unitary columns: psi1 Haar, psi2 = (-conj(b), conj(a)) for psi1 = (a, b)",
        }
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mixed" => Ok(EnsembleKind::Mixed),
            "pure" | "random_pure" => Ok(EnsembleKind::RandomPure),
            "ortho" | "orthogonal" | "orthogonal_pure" => Ok(EnsembleKind::OrthogonalPure),
            _ => Err(Error::InvalidArgument(format!("unknown ensemble kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n_pairs: usize,
    pub seed: u64,
}

pub type StatePair = (HermitianOperator<f64>, HermitianOperator<f64>);

fn gaussian(rng: &mut ChaCha8Rng) -> Complex<f64> {
    // Unit variance per complex entry; the scale cancels on normalization.
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re, im)
}

fn pure_vector(rng: &mut ChaCha8Rng) -> [Complex<f64>; 2] {
    loop {
        let v = [gaussian(rng), gaussian(rng)];
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if norm > 1e-12 {
            return [v[0] / norm, v[1] / norm];
        }
    }
}

fn projector(v: [Complex<f64>; 2]) -> HermitianOperator<f64> {
    let m = DMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj());
    HermitianOperator::from_hermitian_part(m)
}

fn mixed_state(rng: &mut ChaCha8Rng) -> HermitianOperator<f64> {
    let g: CMatrix<f64> = DMatrix::from_fn(2, 2, |_, _| gaussian(rng));
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    HermitianOperator::from_hermitian_part(w.map(|z| z / tr))
}

/// Pair `k` of the ensemble; independent of `n_pairs`.
pub fn sample_pair(kind: EnsembleKind, seed: u64, k: usize) -> StatePair {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, k as u64]));
    match kind {
        EnsembleKind::Mixed => {
            let r1 = mixed_state(&mut rng);
            let r2 = mixed_state(&mut rng);
            (r1, r2)
        }
        EnsembleKind::RandomPure => {
            let r1 = projector(pure_vector(&mut rng));
            let r2 = projector(pure_vector(&mut rng));
            (r1, r2)
        }
        EnsembleKind::OrthogonalPure => {
            let [a, b] = pure_vector(&mut rng);
            (projector([a, b]), projector([-b.conj(), a.conj()]))
        }
    }
}

pub fn sample_ensemble(spec: &EnsembleSpec) -> Vec<StatePair> {
    (0..spec.n_pairs).map(|k| sample_pair(spec.kind, spec.seed, k)).collect()
}
