//! Classical phase space of `n` damped oscillators and its contraction semigroup.
//!
//! Coordinates are ordered `(q₁..qₙ, p₁..pₙ)`. The complex structure maps
//! `(q, p) ↦ (−p, q)` and `P` projects onto the momentum block, so
//! `J P = (1 − P) J` holds exactly in floating point.
//!
//! The generator `Z = ωJ − 2γP` satisfies `(Z + γ)² = (γ² − ω²)`, which
//! collapses `exp(Zt)` to
//!
//! ```text
//! T_t = e^{−γt} [ cosh(αt) + sinh(αt)/α · (Z + γ) ],   α = √(γ² − ω²)
//! ```
//!
//! evaluated here with complex `α` so one code path covers every regime.

use std::fmt;

use nalgebra::Complex;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, RMat, C64};

/// Below this `|αt|` the hyperbolic factors switch to their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;
/// Relative tolerance on `γ²` vs `ω²` for classifying critical damping.
pub const CRITICAL_RTOL: f64 = 1e-12;
const IMAG_RESIDUE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpace {
    n_modes: usize,
    j: RMat,
    p: RMat,
}

impl PhaseSpace {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("phase space needs at least one mode"));
        }
        let dim = 2 * n_modes;
        let mut j = RMat::zeros(dim, dim);
        let mut p = RMat::zeros(dim, dim);
        for k in 0..n_modes {
            j[(k, n_modes + k)] = -1.0;
            j[(n_modes + k, k)] = 1.0;
            p[(n_modes + k, n_modes + k)] = 1.0;
        }
        Ok(Self { n_modes, j, p })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    /// Complex structure `J`.
    pub fn j(&self) -> &RMat {
        &self.j
    }

    /// Momentum projection `P`.
    pub fn p(&self) -> &RMat {
        &self.p
    }

    pub fn identity(&self) -> RMat {
        RMat::identity(self.dim(), self.dim())
    }

    /// Frobenius norm of `JP − (1−P)J`.
    pub fn intertwining_residual(&self) -> f64 {
        let lhs = &self.j * &self.p;
        let rhs = (self.identity() - &self.p) * &self.j;
        (lhs - rhs).norm()
    }

    /// Range of the momentum block: the momentum entries of a phase-space vector.
    pub fn momentum_block(&self, v: &linalg::RVec) -> linalg::RVec {
        v.rows(self.n_modes, self.n_modes).into_owned()
    }

    /// Embeds momentum entries back into the full phase space (zero positions).
    pub fn embed_momentum(&self, p: &linalg::RVec) -> linalg::RVec {
        let mut v = linalg::RVec::zeros(self.dim());
        v.rows_mut(self.n_modes, self.n_modes).copy_from(p);
        v
    }

    /// Complex pairing `⟨m, n⟩ = m·n + i (Jm)·n`, conjugate-linear in `m`.
    pub fn complex_pairing(&self, m: &linalg::RVec, n: &linalg::RVec) -> C64 {
        C64::new(m.dot(n), (&self.j * m).dot(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DampingRegime {
    Underdamped,
    Critical,
    Overdamped,
}

impl fmt::Display for DampingRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DampingRegime::Underdamped => "underdamped",
            DampingRegime::Critical => "critical",
            DampingRegime::Overdamped => "overdamped",
        };
        f.write_str(s)
    }
}

/// The damped-oscillator generator `Z = ωJ − 2γP`.
#[derive(Debug, Clone, PartialEq)]
pub struct DhoGenerator {
    space: PhaseSpace,
    omega: f64,
    gamma: f64,
    z: RMat,
    /// `Z + γ·1`, whose square is the scalar `γ² − ω²`.
    shifted: RMat,
    alpha: C64,
    regime: DampingRegime,
}

impl DhoGenerator {
    pub fn new(space: &PhaseSpace, omega: f64, gamma: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(invalid(format!("omega must be positive and finite, got {omega}")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(invalid(format!("gamma must be non-negative and finite, got {gamma}")));
        }
        let z = space.j() * omega - space.p() * (2.0 * gamma);
        let shifted = &z + space.identity() * gamma;

        let (g2, w2) = (gamma * gamma, omega * omega);
        let regime = if (g2 - w2).abs() <= CRITICAL_RTOL * g2.max(w2) {
            DampingRegime::Critical
        } else if g2 < w2 {
            DampingRegime::Underdamped
        } else {
            DampingRegime::Overdamped
        };
        let alpha = match regime {
            DampingRegime::Critical => C64::new(0.0, 0.0),
            DampingRegime::Underdamped => C64::new(0.0, (w2 - g2).sqrt()),
            DampingRegime::Overdamped => C64::new((g2 - w2).sqrt(), 0.0),
        };

        Ok(Self { space: space.clone(), omega, gamma, z, shifted, alpha, regime })
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn z(&self) -> &RMat {
        &self.z
    }

    /// `Z + γ·1`.
    pub fn shifted(&self) -> &RMat {
        &self.shifted
    }

    /// Principal square root of `γ² − ω²`.
    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn regime(&self) -> DampingRegime {
        self.regime
    }

    /// `ω_d = √(ω² − γ²)` for an underdamped oscillator.
    pub fn damped_frequency(&self) -> Option<f64> {
        match self.regime {
            DampingRegime::Underdamped => Some(self.alpha.im),
            _ => None,
        }
    }

    /// Frobenius norm of `(Z + γ)² − (γ² − ω²)·1`.
    pub fn quadratic_residual(&self) -> f64 {
        let lhs = &self.shifted * &self.shifted;
        let rhs = self.space.identity() * (self.gamma * self.gamma - self.omega * self.omega);
        (lhs - rhs).norm()
    }

    /// Frobenius norm of `Zᵀ + Z + 4γP`.
    pub fn lyapunov_residual(&self) -> f64 {
        (self.z.transpose() + &self.z + self.space.p() * (4.0 * self.gamma)).norm()
    }

    /// Scalar weights `(c, s)` with `T_t = c·1 + s·(Z + γ)`.
    ///
    /// `c = e^{−γt} cosh(αt)` and `s = e^{−γt} sinh(αt)/α`; the critical
    /// limit `sinh(αt)/α → t` is continuous through the series branch.
    pub fn propagator_weights(&self, t: f64) -> Result<(f64, f64)> {
        check_time(t)?;
        let gamma = self.gamma;
        let x = self.alpha * t;
        let (c, s) = if x.norm() < SERIES_THRESHOLD {
            let decay = (-gamma * t).exp();
            let (cosh, sinhc) = hyperbolic_series(x);
            (cosh * decay, sinhc * (t * decay))
        } else {
            let grow = ((self.alpha - gamma) * t).exp();
            let shrink = ((-self.alpha - gamma) * t).exp();
            ((grow + shrink) * 0.5, (grow - shrink) / (self.alpha * 2.0))
        };
        Ok((real_part(c, "cosh weight")?, real_part(s, "sinh weight")?))
    }

    /// `T_t` from the closed-form hyperbolic expression.
    pub fn evolve_closed_form(&self, t: f64) -> Result<Propagator> {
        let (c, s) = self.propagator_weights(t)?;
        let matrix = self.space.identity() * c + &self.shifted * s;
        Ok(Propagator { t, matrix })
    }

    /// `T_t = exp(Zt)` from the generic scaling-and-squaring exponential.
    pub fn evolve_oracle(&self, t: f64) -> Result<Propagator> {
        check_time(t)?;
        Ok(Propagator { t, matrix: linalg::expm(&(&self.z * t)) })
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("evolution time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// Six-term Taylor series of `cosh x` and `sinh x / x`.
fn hyperbolic_series(x: C64) -> (C64, C64) {
    let x2 = x * x;
    let mut cosh = Complex::new(0.0, 0.0);
    let mut sinhc = Complex::new(0.0, 0.0);
    let mut term_c = Complex::new(1.0, 0.0);
    let mut term_s = Complex::new(1.0, 0.0);
    for k in 0..6 {
        cosh += term_c;
        sinhc += term_s;
        let k = k as f64;
        term_c = term_c * x2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        term_s = term_s * x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    (cosh, sinhc)
}

fn real_part(z: C64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_RESIDUE_TOL * z.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("{what} has imaginary residue {:e}", z.im)));
    }
    Ok(z.re)
}

/// A semigroup element `T_t` with its time.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    t: f64,
    matrix: RMat,
}

impl Propagator {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMat {
        self.matrix
    }

    pub fn sigma_max(&self) -> f64 {
        linalg::sigma_max(&self.matrix)
    }
}
