//! Gauge-invariant quasifree states of the CAR algebra over `ℂ^d`.
//!
//! Such a state is fixed by its one-particle density `R` (`0 ≤ R = R* ≤ 1`)
//! through `φ[c(m)* c(n)] = ⟨m, R n⟩` and `φ[c(m) c(n)] = 0`. It is realised
//! as a Fock state over `ℂ^d ⊕ ℂ^d` by the unitary
//!
//! ```text
//! V = [ √R      √(1−R) ]
//!     [ √(1−R)  −√R    ]
//! ```
//!
//! split against the doubled structure `i ⊕ (−i)`: the diagonal blocks form
//! the complex-linear part, the off-diagonal blocks the conjugate-linear part.

use crate::car_fock::{transformed_creation, FieldOperator, FockRep, OneParticleSpace};
use crate::error::{invalid, Error, Result};
use crate::finite_dilation::BogoliubovPair;
use crate::linalg::{self, CMat, CVec, C64};

/// Largest one-particle dimension for the doubled Fock representation.
pub const MAX_FOCK_DIM: usize = 6;
const SPECTRUM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;

const I: C64 = C64::new(0.0, 1.0);

/// Quasifree state with `S = 0`, stored through `R` and `1 − R`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasifreeState {
    r: CMat,
    complement: CMat,
}

impl QuasifreeState {
    pub fn new(r: CMat) -> Result<Self> {
        let d = r.nrows();
        let complement = CMat::identity(d, d) - &r;
        Self::from_parts(r, complement)
    }

    fn from_parts(r: CMat, complement: CMat) -> Result<Self> {
        if !r.is_square() || r.nrows() == 0 {
            return Err(invalid(format!("density must be a non-empty square matrix, got {:?}", r.shape())));
        }
        let skew = (&r - r.adjoint()).norm();
        if skew > SPECTRUM_TOL {
            return Err(invalid(format!("density is not Hermitian (‖R − R*‖ = {skew:e})")));
        }
        let spectrum = r.clone().symmetric_eigen().eigenvalues;
        if let Some(bad) = spectrum
            .iter()
            .find(|&&x| x < -SPECTRUM_TOL || x > 1.0 + SPECTRUM_TOL)
        {
            return Err(invalid(format!("density eigenvalue {bad} outside [0, 1]")));
        }
        Ok(Self { r, complement })
    }

    /// The vacuum (Fock) state, `R = 0`.
    pub fn fock(d: usize) -> Result<Self> {
        Self::new(CMat::zeros(d, d))
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn r(&self) -> &CMat {
        &self.r
    }

    /// `1 − R`, evaluated without cancellation for thermal states.
    pub fn complement(&self) -> &CMat {
        &self.complement
    }

    /// `φ[c(m)* c(n)] = ⟨m, R n⟩`.
    pub fn two_point(&self, m: &CVec, n: &CVec) -> Result<C64> {
        self.check_vectors(m, n)?;
        Ok(m.dotc(&(&self.r * n)))
    }

    /// `φ[c(m) c(n)]`, identically zero for gauge-invariant states.
    pub fn pair_function(&self, m: &CVec, n: &CVec) -> Result<C64> {
        self.check_vectors(m, n)?;
        Ok(C64::new(0.0, 0.0))
    }

    fn check_vectors(&self, m: &CVec, n: &CVec) -> Result<()> {
        if m.len() != self.dim() || n.len() != self.dim() {
            return Err(invalid(format!(
                "vectors of length {} and {} for a state on ℂ^{}",
                m.len(),
                n.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

fn check_hermitian(h: &CMat) -> Result<()> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(invalid(format!("Hamiltonian must be a non-empty square matrix, got {:?}", h.shape())));
    }
    let skew = (h - h.adjoint()).norm();
    if skew > HERMITIAN_TOL * h.norm().max(1.0) {
        return Err(invalid(format!("Hamiltonian is not Hermitian (‖H − H*‖ = {skew:e})")));
    }
    Ok(())
}

/// `f(H) = U f(h) U*` for Hermitian `H`.
fn hermitian_function(h: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let diag = eig.eigenvalues.map(|x| C64::new(f(x), 0.0));
    &eig.eigenvectors * CMat::from_diagonal(&diag) * eig.eigenvectors.adjoint()
}

/// Thermal state `R = (1 + e^{−βH})^{−1}`.
pub fn kms_state(h: &CMat, beta: f64) -> Result<QuasifreeState> {
    check_hermitian(h)?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid(format!("inverse temperature must be positive and finite, got {beta}")));
    }
    let r = hermitian_function(h, |x| 1.0 / (1.0 + (-beta * x).exp()));
    let complement = hermitian_function(h, |x| 1.0 / (1.0 + (beta * x).exp()));
    QuasifreeState::from_parts(r, complement)
}

/// The unitary dilation `V` of a state and its split against `i ⊕ (−i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDilation {
    v: CMat,
    a: CMat,
    b: CMat,
    jt: CMat,
}

impl StateDilation {
    pub fn v(&self) -> &CMat {
        &self.v
    }

    /// Complex-linear part: `diag(√R, −√R)`.
    pub fn a(&self) -> &CMat {
        &self.a
    }

    /// Conjugate-linear part: off-diagonal `√(1−R)` blocks.
    pub fn b(&self) -> &CMat {
        &self.b
    }

    /// `i ⊕ (−i)`.
    pub fn jt(&self) -> &CMat {
        &self.jt
    }

    pub fn unitarity_residual(&self) -> f64 {
        let n = self.v.nrows();
        (self.v.adjoint() * &self.v - CMat::identity(n, n)).norm()
    }
}

pub fn dilate_state(st: &QuasifreeState) -> Result<StateDilation> {
    let d = st.dim();
    let sqrt_r = linalg::sqrt_psd_hermitian(st.r()).map_err(|e| invalid(e.to_string()))?;
    let sqrt_c = linalg::sqrt_psd_hermitian(st.complement()).map_err(|e| invalid(e.to_string()))?;

    let mut v = CMat::zeros(2 * d, 2 * d);
    v.view_mut((0, 0), (d, d)).copy_from(&sqrt_r);
    v.view_mut((0, d), (d, d)).copy_from(&sqrt_c);
    v.view_mut((d, 0), (d, d)).copy_from(&sqrt_c);
    v.view_mut((d, d), (d, d)).copy_from(&(-&sqrt_r));

    let jt = CMat::from_diagonal(&CVec::from_fn(2 * d, |k, _| if k < d { I } else { -I }));
    let conj = &jt * &v * &jt;
    let half = C64::new(0.5, 0.0);
    let a = (&v - &conj) * half;
    let b = (&v + &conj) * half;
    Ok(StateDilation { v, a, b, jt })
}

/// `⟨m, R n⟩` straight from the density.
pub fn two_point_direct(st: &QuasifreeState, m: &CVec, n: &CVec) -> Result<C64> {
    st.two_point(m, n)
}

/// The state realised on the Fock space over `ℂ^d ⊕ ℂ^d`.
///
/// `c(m)` is represented by `c_V(jm) = c(a_V jm) + c(b_V jm)*`, and the state
/// is the vacuum expectation.
#[derive(Debug, Clone)]
pub struct QuasifreeFock {
    d: usize,
    rep: FockRep,
    space: OneParticleSpace,
    pair: BogoliubovPair,
}

impl QuasifreeFock {
    pub fn new(st: &QuasifreeState) -> Result<Self> {
        let d = st.dim();
        if d > MAX_FOCK_DIM {
            return Err(Error::ResourceLimit(format!(
                "doubled Fock representation supports d ≤ {MAX_FOCK_DIM}, got {d}"
            )));
        }
        let dil = dilate_state(st)?;
        let rep = FockRep::new(2 * d)?;
        let space = OneParticleSpace::new(linalg::realify(dil.jt()))?;
        let pair = BogoliubovPair::new(linalg::realify(dil.a()), linalg::realify(dil.b()))?;
        Ok(Self { d, rep, space, pair })
    }

    pub fn rep(&self) -> &FockRep {
        &self.rep
    }

    /// `π(c(m)) = c_V(jm)`.
    pub fn field(&self, m: &CVec) -> Result<FieldOperator> {
        if m.len() != self.d {
            return Err(invalid(format!("vector of length {} for a state on ℂ^{}", m.len(), self.d)));
        }
        let mut jm = CVec::zeros(2 * self.d);
        jm.rows_mut(0, self.d).copy_from(m);
        transformed_creation(&self.rep, &self.space, &self.pair, &linalg::realify_vec(&jm))
    }

    /// `⟨Ω, X Y Ω⟩ = ⟨X* Ω, Y Ω⟩`.
    pub fn expectation(&self, x: &FieldOperator, y: &FieldOperator) -> Result<C64> {
        let omega = self.rep.vacuum();
        let left = x.adjoint().apply(&self.rep, &omega)?;
        let right = y.apply(&self.rep, &omega)?;
        Ok(left.dotc(&right))
    }
}

/// `⟨c_V(jm) Ω, c_V(jn) Ω⟩` in the doubled Fock representation.
pub fn two_point_via_fock(st: &QuasifreeState, m: &CVec, n: &CVec) -> Result<C64> {
    let fock = QuasifreeFock::new(st)?;
    let cm = fock.field(m)?;
    let cn = fock.field(n)?;
    fock.expectation(&cm.adjoint(), &cn)
}

/// How creation operators move under `A_t = U_t* A U_t`, `U_t = e^{−iHt}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvolutionConvention {
    /// `c(m)_t = c(e^{iHt} m)`; consistent with `R = (1 + e^{−βH})^{−1}`.
    #[default]
    Heisenberg,
    /// `c(m)_t = c(e^{−iHt} m)`; pairs with `R = (1 + e^{βH})^{−1}` instead.
    Reversed,
}

/// `|φ[A B] − φ[B A_{iβ}]|` for `A = c(m)*`, `B = c(n)` in the given state.
///
/// Continuing `c(m)*_t = c(e^{±iHt} m)*` to `t = iβ` gives `c(e^{±βH} m)*`.
/// Both sides are evaluated in the doubled Fock representation of `st`.
pub fn kms_residual(
    st: &QuasifreeState,
    h: &CMat,
    beta: f64,
    m: &CVec,
    n: &CVec,
    convention: EvolutionConvention,
) -> Result<f64> {
    check_hermitian(h)?;
    if h.nrows() != st.dim() {
        return Err(invalid("Hamiltonian and state act on different spaces"));
    }
    let sign = match convention {
        EvolutionConvention::Heisenberg => 1.0,
        EvolutionConvention::Reversed => -1.0,
    };
    let continued = hermitian_function(h, |x| (sign * beta * x).exp()) * m;

    let fock = QuasifreeFock::new(st)?;
    let cm = fock.field(m)?;
    let cn = fock.field(n)?;
    let cv = fock.field(&continued)?;
    let lhs = fock.expectation(&cm.adjoint(), &cn)?;
    let rhs = fock.expectation(&cn, &cv.adjoint())?;
    Ok((lhs - rhs).norm())
}

/// KMS residual of the thermal state `kms_state(H, β)` under the default convention.
pub fn kms_two_point_check(h: &CMat, beta: f64, m: &CVec, n: &CVec) -> Result<f64> {
    let st = kms_state(h, beta)?;
    kms_residual(&st, h, beta, m, n, EvolutionConvention::default())
}
