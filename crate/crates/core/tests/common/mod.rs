#![allow(dead_code)]

use dho_core::linalg::{realify, CMat, CVec, RMat, RVec, C64};
use dho_core::{DhoGenerator, PhaseSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dho(n: usize, omega: f64, gamma: f64) -> DhoGenerator {
    DhoGenerator::new(&PhaseSpace::new(n).unwrap(), omega, gamma).unwrap()
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> RVec {
    RVec::from_fn(n, |_, _| gaussian(rng))
}

pub fn random_unit(rng: &mut impl Rng, n: usize) -> RVec {
    let v = random_vec(rng, n);
    let norm = v.norm();
    v / norm
}

pub fn random_cvec(rng: &mut impl Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

/// Haar-distributed orthogonal matrix (QR with sign correction).
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> RMat {
    let qr = RMat::from_fn(n, n, |_, _| gaussian(rng)).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    let qr = CMat::from_fn(n, n, |_, _| C64::new(gaussian(rng), gaussian(rng))).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, k)] *= phase;
            }
        }
    }
    q
}

/// Orthogonal matrix on `ℝ^{2n}` commuting with the block complex structure.
pub fn random_j_orthogonal(rng: &mut impl Rng, n: usize) -> RMat {
    realify(&random_unitary(rng, n))
}

/// Random matrix rescaled so its largest singular value lies in `[0.2, 1]`.
pub fn random_contraction(rng: &mut impl Rng, n: usize) -> RMat {
    let a = RMat::from_fn(n, n, |_, _| gaussian(rng));
    let s = a.clone().svd(false, false).singular_values.max();
    let target: f64 = rng.random_range(0.2..=1.0);
    a * (target / s)
}

pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> CMat {
    let a = CMat::from_fn(d, d, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Random density `0 ≤ R ≤ 1`.
pub fn random_density(rng: &mut impl Rng, d: usize) -> CMat {
    let u = random_unitary(rng, d);
    let eig = CVec::from_fn(d, |_, _| C64::new(rng.random_range(0.0..=1.0), 0.0));
    &u * CMat::from_diagonal(&eig) * u.adjoint()
}
