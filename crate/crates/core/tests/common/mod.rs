#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use nmdistill::maps::KrausMap;
use nmdistill::{CMatrix64, HermitianOperator64, PauliChannel64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex<f64> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re, im)
}

pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix64 {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> HermitianOperator64 {
    let g = ginibre(rng, dim, dim);
    HermitianOperator64::new((&g + g.adjoint()).map(|z| z * 0.5)).unwrap()
}

pub fn random_traceless(rng: &mut ChaCha8Rng, dim: usize) -> HermitianOperator64 {
    let h = random_hermitian(rng, dim);
    let shift = h.trace() / dim as f64;
    let m = h.matrix() - CMatrix64::identity(dim, dim).map(|z| z * shift);
    HermitianOperator64::new(m).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> HermitianOperator64 {
    let g = ginibre(rng, dim, dim);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    HermitianOperator64::new(w.map(|z| z / tr)).unwrap()
}

/// Haar-distributed pure state projector.
pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> HermitianOperator64 {
    let v = ginibre(rng, dim, 1);
    let v = &v / Complex::new(v.norm(), 0.0);
    HermitianOperator64::new(&v * v.adjoint()).unwrap()
}

/// `rows × cols` isometry from the QR factor of a Ginibre matrix.
pub fn random_isometry(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix64 {
    let q = ginibre(rng, rows, cols).qr().q();
    q.columns(0, cols).into_owned()
}

/// Random CPTP map `dim_in → dim_out` with `env` Kraus operators.
pub fn random_cptp(rng: &mut ChaCha8Rng, dim_in: usize, dim_out: usize, env: usize) -> KrausMap<f64> {
    let v = random_isometry(rng, env * dim_out, dim_in);
    KrausMap::from_isometry(&v, dim_out).unwrap()
}

pub fn random_pauli_channel(rng: &mut ChaCha8Rng) -> PauliChannel64 {
    let w: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    PauliChannel64::new(w[0] / s, w[1] / s, w[2] / s, w[3] / s).unwrap()
}

/// Maximal absolute entry of `a − b`.
pub fn max_diff(a: &CMatrix64, b: &CMatrix64) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
