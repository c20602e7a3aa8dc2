//! Dense linear-algebra helpers shared by the oscillator modules.
//!
//! The matrix exponential and the Lyapunov solver here are deliberately
//! generic: they know nothing about the oscillator structure and serve as
//! independent cross-checks for the closed-form routes.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<C64>;
pub type RVec = DVector<f64>;
pub type CVec = DVector<C64>;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as rounding noise and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-12;

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

/// Maximum absolute column sum.
pub fn norm1(a: &RMat) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &RMat) -> RMat {
    assert!(a.is_square(), "expm: matrix must be square");
    let n = a.nrows();
    let ident = RMat::identity(n, n);
    let norm = norm1(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * 2f64.powi(-squarings);

    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = &a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Solves `Aᵀ X + X A = C` by vectorising into `(I ⊗ Aᵀ + Aᵀ ⊗ I) vec X = vec C`.
///
/// Intended for the small (≤ 16×16) generators in this crate; the Kronecker
/// system has `n²` unknowns.
pub fn solve_lyapunov(a: &RMat, c: &RMat) -> Result<RMat> {
    let n = a.nrows();
    if !a.is_square() || c.shape() != (n, n) {
        return Err(Error::InvalidArgument(format!(
            "lyapunov: expected square {n}×{n} operands, got {:?} and {:?}",
            a.shape(),
            c.shape()
        )));
    }
    let at = a.transpose();
    let ident = RMat::identity(n, n);
    let system = ident.kronecker(&at) + at.kronecker(&ident);
    let rhs = RVec::from_column_slice(c.as_slice());
    let sol = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("lyapunov: singular Kronecker system".into()))?;
    Ok(RMat::from_column_slice(n, n, sol.as_slice()))
}

/// Largest singular value.
pub fn sigma_max(a: &RMat) -> f64 {
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Principal square root of a symmetric positive semidefinite matrix.
///
/// The input is symmetrised first. Eigenvalues below `-PSD_CLAMP` are an error.
pub fn sqrt_psd(a: &RMat) -> Result<RMat> {
    sqrt_psd_floored(a, 0.0)
}

/// [`sqrt_psd`] with eigenvalues up to `floor` also mapped to zero.
pub fn sqrt_psd_floored(a: &RMat, floor: f64) -> Result<RMat> {
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut roots = eig.eigenvalues.clone();
    for ev in roots.iter_mut() {
        *ev = if *ev <= floor { clamped_root(ev.min(0.0))? } else { ev.sqrt() };
    }
    let q = &eig.eigenvectors;
    Ok(q * RMat::from_diagonal(&roots) * q.transpose())
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn sqrt_psd_hermitian(a: &CMat) -> Result<CMat> {
    let herm = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut roots = CVec::zeros(eig.eigenvalues.len());
    for (r, ev) in roots.iter_mut().zip(eig.eigenvalues.iter()) {
        *r = C64::new(clamped_root(*ev)?, 0.0);
    }
    let q = &eig.eigenvectors;
    Ok(q * CMat::from_diagonal(&roots) * q.adjoint())
}

fn clamped_root(ev: f64) -> Result<f64> {
    if ev < -PSD_CLAMP {
        return Err(Error::Numerical(format!(
            "matrix is not positive semidefinite (eigenvalue {ev:e})"
        )));
    }
    Ok(ev.max(0.0).sqrt())
}

/// Real `2n×2n` matrix of a complex `n×n` matrix acting on `(Re z, Im z)`.
pub fn realify(c: &CMat) -> RMat {
    let (r, k) = c.shape();
    let mut out = RMat::zeros(2 * r, 2 * k);
    for i in 0..r {
        for j in 0..k {
            let z = c[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + k)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + k)] = z.re;
        }
    }
    out
}

/// `(Re z, Im z)` layout of a complex vector.
pub fn realify_vec(v: &CVec) -> RVec {
    let n = v.len();
    RVec::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

/// Block-diagonal `a ⊕ b`.
pub fn direct_sum(a: &RMat, b: &RMat) -> RMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = RMat::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(|x| C64::new(x, 0.0))
}
