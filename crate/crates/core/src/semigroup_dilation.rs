//! Unitary dilation of the whole semigroup on a sampled `L²(ℝ, PM)`.
//!
//! The injection `(jm)(s) = 2√γ Θ(s) P T_s m` is an isometry because
//! `Zᵀ + Z = −4γP`. With the shift `(U_t f)(s) = f(s + t)` it satisfies
//! `j* U_t j = T_t`. Functions are sampled at cell centres `s_i = (i + ½)·dt`
//! with midpoint weights, so an integer shift is an index permutation.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::car_fock::{creation, second_quantize_projection, FockRep, OneParticleSpace};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CVec, RMat, RVec, C64};
use crate::phase_space::{DampingRegime, DhoGenerator};

/// Relative squared-norm loss tolerated when a shift pushes mass off the grid.
pub const SHIFT_MASS_TOL: f64 = 1e-8;
/// The window must hold at least this many decay lengths of the slowest mode.
pub const MIN_DECAY_LENGTHS: f64 = 10.0;
/// Singular values below this (relative) span the critical kernel.
pub const KERNEL_TOL: f64 = 1e-10;
const SHIFT_MULTIPLE_TOL: f64 = 1e-12;
const REPRESENTATION_TOL: f64 = 1e-8;

/// Uniform cell-centred time grid on `[t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineGrid {
    dt: f64,
    negative_cells: usize,
    points: usize,
}

impl HalfLineGrid {
    /// Grid covering `[−max_shift, t_max]`, both ends rounded outward to whole cells.
    pub fn new(dt: f64, t_max: f64, max_shift: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid(format!("grid spacing must be positive, got {dt}")));
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(invalid(format!("t_max must be positive, got {t_max}")));
        }
        if !(max_shift >= 0.0) || !max_shift.is_finite() {
            return Err(invalid(format!("max_shift must be non-negative, got {max_shift}")));
        }
        let positive = (t_max / dt - SHIFT_MULTIPLE_TOL).ceil().max(1.0) as usize;
        let negative_cells = (max_shift / dt - SHIFT_MULTIPLE_TOL).ceil().max(0.0) as usize;
        Ok(Self { dt, negative_cells, points: negative_cells + positive })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn t_min(&self) -> f64 {
        -(self.negative_cells as f64) * self.dt
    }

    pub fn t_max(&self) -> f64 {
        (self.points - self.negative_cells) as f64 * self.dt
    }

    /// Index of the first cell with a positive centre.
    pub fn origin(&self) -> usize {
        self.negative_cells
    }

    /// Centre of cell `i`.
    pub fn time(&self, i: usize) -> f64 {
        (i as f64 - self.negative_cells as f64 + 0.5) * self.dt
    }

    /// Quadrature weight of every cell (midpoint rule).
    pub fn weight(&self) -> f64 {
        self.dt
    }

    /// `t / dt` as an integer, if `t` is a whole number of cells.
    pub fn steps(&self, t: f64) -> Result<isize> {
        let k = (t / self.dt).round();
        if !t.is_finite() || (t - k * self.dt).abs() > SHIFT_MULTIPLE_TOL * t.abs().max(1.0) {
            return Err(invalid(format!("shift {t} is not an integer multiple of dt = {}", self.dt)));
        }
        Ok(k as isize)
    }
}

/// Momentum-valued function sampled on a [`HalfLineGrid`].
///
/// `values` has one row per cell and one column per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineFunction {
    grid: HalfLineGrid,
    values: RMat,
}

impl HalfLineFunction {
    pub fn zeros(grid: HalfLineGrid, n_modes: usize) -> Self {
        Self { grid, values: RMat::zeros(grid.points(), n_modes) }
    }

    pub fn from_values(grid: HalfLineGrid, values: RMat) -> Result<Self> {
        if values.nrows() != grid.points() {
            return Err(invalid(format!(
                "{} samples supplied for a grid of {} cells",
                values.nrows(),
                grid.points()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &HalfLineGrid {
        &self.grid
    }

    pub fn values(&self) -> &RMat {
        &self.values
    }

    pub fn n_modes(&self) -> usize {
        self.values.ncols()
    }

    /// Value at cell `i`.
    pub fn sample(&self, i: usize) -> RVec {
        self.values.row(i).transpose()
    }

    pub fn norm_sq(&self) -> f64 {
        self.grid.weight() * self.values.norm_squared()
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.grid.weight() * self.values.dot(&other.values))
    }

    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { grid: self.grid, values: &self.values + &other.values * a })
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { grid: self.grid, values: &self.values * a }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.n_modes() != other.n_modes() {
            return Err(invalid("half-line functions live on different grids"));
        }
        Ok(())
    }
}

/// Shortest admissible `t_max`: `MIN_DECAY_LENGTHS / (γ − Re α)`.
///
/// The slowest component of `T_t` decays at `γ − Re α`, which is `γ` unless
/// the oscillator is overdamped.
pub fn min_window(g: &DhoGenerator) -> Result<f64> {
    let gamma = g.gamma();
    if !(gamma > 0.0) {
        return Err(invalid("half-line injection is an isometry only for gamma > 0"));
    }
    let rate = match g.regime() {
        DampingRegime::Overdamped => g.omega() * g.omega() / (gamma + g.alpha().re),
        _ => gamma,
    };
    Ok(MIN_DECAY_LENGTHS / rate)
}

fn check_generator(g: &DhoGenerator, grid: &HalfLineGrid) -> Result<()> {
    let needed = min_window(g)?;
    if grid.t_max() < needed * (1.0 - 1e-12) {
        return Err(invalid(format!(
            "grid window t_max = {} is shorter than {needed} ({MIN_DECAY_LENGTHS} decay lengths)",
            grid.t_max()
        )));
    }
    Ok(())
}

fn check_vector(g: &DhoGenerator, m: &RVec) -> Result<()> {
    if m.len() != g.space().dim() {
        return Err(invalid(format!(
            "vector of length {} for a phase space of dimension {}",
            m.len(),
            g.space().dim()
        )));
    }
    Ok(())
}

/// `(jm)(s) = 2√γ Θ(s) P T_s m` on the grid.
pub fn inject_halfline(g: &DhoGenerator, m: &RVec, grid: &HalfLineGrid) -> Result<HalfLineFunction> {
    check_generator(g, grid)?;
    check_vector(g, m)?;
    let ps = g.space();
    let scale = 2.0 * g.gamma().sqrt();
    let pm = ps.momentum_block(m) * scale;
    let pkm = ps.momentum_block(&(g.shifted() * m)) * scale;

    let mut out = HalfLineFunction::zeros(*grid, ps.n_modes());
    for i in grid.origin()..grid.points() {
        let (c, s) = g.propagator_weights(grid.time(i))?;
        out.values.row_mut(i).copy_from(&(&pm * c + &pkm * s).transpose());
    }
    Ok(out)
}

/// `U_t f` together with the squared norm that fell off the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Shifted {
    pub function: HalfLineFunction,
    pub lost_mass: f64,
}

/// `(U_t f)(s) = f(s + t)` with zero fill, reporting any mass lost.
pub fn shift_reporting(f: &HalfLineFunction, t: f64) -> Result<Shifted> {
    let grid = f.grid;
    let k = grid.steps(t)?;
    let n = grid.points() as isize;
    let mut out = HalfLineFunction::zeros(grid, f.n_modes());
    let mut lost = 0.0;
    for src in 0..n {
        let dst = src - k;
        let row = f.values.row(src as usize);
        if (0..n).contains(&dst) {
            out.values.row_mut(dst as usize).copy_from(&row);
        } else {
            lost += row.norm_squared();
        }
    }
    Ok(Shifted { function: out, lost_mass: lost * grid.weight() })
}

/// `U_t f`; fails if more than `SHIFT_MASS_TOL` of the squared norm leaves the window.
pub fn shift(f: &HalfLineFunction, t: f64) -> Result<HalfLineFunction> {
    let shifted = shift_reporting(f, t)?;
    if shifted.lost_mass > SHIFT_MASS_TOL * f.norm_sq().max(f64::MIN_POSITIVE) {
        return Err(Error::WindowTooSmall { lost_mass: shifted.lost_mass });
    }
    Ok(shifted.function)
}

/// `j* f = ∫₀^∞ 2√γ (P T_s)ᵀ f(s) ds`.
pub fn compress(f: &HalfLineFunction, g: &DhoGenerator) -> Result<RVec> {
    let ps = g.space();
    if f.n_modes() != ps.n_modes() {
        return Err(invalid(format!(
            "function has {} components, generator has {} modes",
            f.n_modes(),
            ps.n_modes()
        )));
    }
    let grid = f.grid;
    let mut cosh_part = RVec::zeros(ps.n_modes());
    let mut sinh_part = RVec::zeros(ps.n_modes());
    for i in grid.origin()..grid.points() {
        let (c, s) = g.propagator_weights(grid.time(i))?;
        let row = f.values.row(i).transpose();
        cosh_part += &row * c;
        sinh_part += &row * s;
    }
    let scale = 2.0 * g.gamma().sqrt() * grid.weight();
    let out = ps.embed_momentum(&cosh_part) + g.shifted().transpose() * ps.embed_momentum(&sinh_part);
    Ok(out * scale)
}

/// `Q f = j j* f`.
pub fn project_q(f: &HalfLineFunction, g: &DhoGenerator) -> Result<HalfLineFunction> {
    inject_halfline(g, &compress(f, g)?, f.grid())
}

/// Momentum-block amplitudes `(F jm)(E)` at a list of energies.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitude {
    pub energies: Vec<f64>,
    pub amplitudes: Vec<CVec>,
}

impl SpectralAmplitude {
    /// `|(F jm)(E)|²` per energy.
    pub fn power(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_squared()).collect()
    }

    /// Energy of the largest `|F jm|²`.
    pub fn peak(&self) -> Option<f64> {
        self.power()
            .into_iter()
            .zip(&self.energies)
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, &e)| e)
    }
}

/// Resonance amplitude `√(2γ/π) · P(ωJ + iE)m / (ω² − E² + 2iγE)`.
///
/// This is the Fourier transform `(2π)^{−1/2} ∫ e^{−iEt} (jm)(t) dt`
/// evaluated through `(iE − Z)^{−1} = (iE + Z + 2γ) / (ω² − E² + 2iγE)`.
pub fn spectral_amplitude_closed(g: &DhoGenerator, m: &RVec, energies: &[f64]) -> Result<SpectralAmplitude> {
    if !(g.gamma() > 0.0) {
        return Err(invalid("spectral amplitude requires gamma > 0"));
    }
    check_vector(g, m)?;
    let ps = g.space();
    let (omega, gamma) = (g.omega(), g.gamma());
    let prefactor = (2.0 * gamma / PI).sqrt();
    let q_part = ps.momentum_block(&(ps.j() * m)) * omega;
    let p_part = ps.momentum_block(m);
    let amplitudes = energies
        .iter()
        .map(|&e| {
            let denom = C64::new(omega * omega - e * e, 2.0 * gamma * e);
            let scale = C64::new(prefactor, 0.0) / denom;
            CVec::from_fn(ps.n_modes(), |k, _| C64::new(q_part[k], e * p_part[k]) * scale)
        })
        .collect();
    Ok(SpectralAmplitude { energies: energies.to_vec(), amplitudes })
}

/// Discrete Fourier transform of the sampled `jm`, with kernel `e^{−iEt}`
/// and prefactor `1/√(2π)`.
///
/// The transform is zero-padded so the energy spacing is at most
/// `resolution` when one is given. Energies are returned ascending and
/// limited to `|E| ≤ π/(4 dt)`.
pub fn spectral_amplitude_fft(
    g: &DhoGenerator,
    m: &RVec,
    grid: &HalfLineGrid,
    resolution: Option<f64>,
) -> Result<SpectralAmplitude> {
    let jm = inject_halfline(g, m, grid)?;
    let dt = grid.dt();
    let samples = grid.points() - grid.origin();
    let mut len = samples;
    if let Some(res) = resolution {
        if !(res > 0.0) {
            return Err(invalid(format!("resolution must be positive, got {res}")));
        }
        len = len.max((2.0 * PI / (res * dt)).ceil() as usize);
    }

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(len);
    let n_modes = jm.n_modes();
    let mut spectra = Vec::with_capacity(n_modes);
    for k in 0..n_modes {
        let mut buf: Vec<C64> = (0..len)
            .map(|l| {
                let x = if l < samples { jm.values[(grid.origin() + l, k)] } else { 0.0 };
                C64::new(x, 0.0)
            })
            .collect();
        fft.process(&mut buf);
        spectra.push(buf);
    }

    let band = PI / (4.0 * dt);
    let norm = dt / (2.0 * PI).sqrt();
    let mut bins: Vec<(f64, usize)> = (0..len)
        .map(|k| {
            let signed = if k < len.div_ceil(2) { k as f64 } else { k as f64 - len as f64 };
            (2.0 * PI * signed / (len as f64 * dt), k)
        })
        .filter(|(e, _)| e.abs() <= band)
        .collect();
    bins.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut energies = Vec::with_capacity(bins.len());
    let mut amplitudes = Vec::with_capacity(bins.len());
    for (e, k) in bins {
        // Cell centres sit half a step past the sample index.
        let phase = C64::from_polar(norm, -e * dt * 0.5);
        energies.push(e);
        amplitudes.push(CVec::from_fn(n_modes, |c, _| spectra[c][k] * phase));
    }
    Ok(SpectralAmplitude { energies, amplitudes })
}

/// `∫ |(F jm)(E)|² dE` over the whole line, via `E = tan θ` and the midpoint rule.
pub fn spectral_mass(g: &DhoGenerator, m: &RVec, cells: usize) -> Result<f64> {
    let h = PI / cells as f64;
    let thetas: Vec<f64> = (0..cells).map(|i| -PI / 2.0 + (i as f64 + 0.5) * h).collect();
    let energies: Vec<f64> = thetas.iter().map(|t| t.tan()).collect();
    let amp = spectral_amplitude_closed(g, m, &energies)?;
    Ok(amp
        .power()
        .iter()
        .zip(&thetas)
        .map(|(p, t)| p / (t.cos() * t.cos()))
        .sum::<f64>()
        * h)
}

/// `⟨m, T_tᵀ T_t n⟩` by the closed-form propagator and on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayValues {
    /// `⟨T_t m, T_t n⟩` from the closed form.
    pub analytic: C64,
    /// `⟨j* U_t j m, j* U_t j n⟩` from the sampled dilation.
    pub grid: C64,
}

impl DecayValues {
    pub fn deviation(&self) -> f64 {
        (self.analytic - self.grid).norm()
    }
}

pub fn decay_expectation(
    g: &DhoGenerator,
    m: &RVec,
    n: &RVec,
    t: f64,
    grid: &HalfLineGrid,
) -> Result<DecayValues> {
    if !(t >= 0.0) {
        return Err(invalid(format!("decay time must be non-negative, got {t}")));
    }
    check_vector(g, m)?;
    check_vector(g, n)?;
    let ps = g.space();
    let tt = g.evolve_closed_form(t)?;
    let analytic = ps.complex_pairing(&(tt.matrix() * m), &(tt.matrix() * n));

    let evolved = |v: &RVec| -> Result<RVec> {
        let jv = inject_halfline(g, v, grid)?;
        compress(&shift(&jv, t)?, g)
    };
    let grid_value = ps.complex_pairing(&evolved(m)?, &evolved(n)?);
    Ok(DecayValues { analytic, grid: grid_value })
}

/// Orthonormal basis of `ker(Z + γ)` for a critically damped generator.
pub fn critical_kernel(g: &DhoGenerator) -> Result<Vec<RVec>> {
    if g.regime() != DampingRegime::Critical {
        return Err(invalid(format!("kernel of Z + gamma requires critical damping, regime is {}", g.regime())));
    }
    let k = g.shifted();
    let svd = k.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let cutoff = KERNEL_TOL * k.norm().max(1.0);
    let basis: Vec<RVec> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < cutoff)
        .map(|(i, _)| {
            let v = v_t.row(i).transpose();
            let pivot = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
            v * pivot.signum()
        })
        .collect();
    if basis.is_empty() {
        return Err(Error::InconsistentGenerator("critical generator has an empty kernel".into()));
    }
    Ok(basis)
}

/// Gram matrix `X` solving `Zᵀ X + X Z = −4γP`; equals the identity when the
/// half-line injection is an isometry.
pub fn lyapunov_gram(g: &DhoGenerator) -> Result<RMat> {
    if !(g.gamma() > 0.0) {
        return Err(invalid("Lyapunov Gram equation is singular for gamma = 0"));
    }
    let rhs = g.space().p() * (-4.0 * g.gamma());
    linalg::solve_lyapunov(g.z(), &rhs)
}

/// Gram-Schmidt in the grid inner product; vectors whose residual falls
/// below `drop_tol` times their norm are skipped.
fn orthonormalize(basis: &mut Vec<HalfLineFunction>, candidates: &[HalfLineFunction], drop_tol: f64) -> Result<()> {
    for v in candidates {
        let scale = v.norm_sq().sqrt();
        if scale == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.inner(&r)?;
                r = r.axpy(-c, b)?;
            }
        }
        let norm = r.norm_sq().sqrt();
        if norm > drop_tol * scale {
            basis.push(r.scaled(1.0 / norm));
        }
    }
    Ok(())
}

/// `⟨c(jm)Ω, Q̃(t) c(jn)Ω⟩` in a truncated Fock space, `Q̃(t) = Γ(U_t)* Q̃ Γ(U_t)`.
///
/// The one-particle space is truncated to `S = jM ⊕ span{(1−Q) U_t jm, (1−Q) U_t jn}`,
/// which contains all four vectors and is invariant under `Q`, so the
/// compressed `Q` is still a projection. The vacuum is stationary, so the
/// Heisenberg-evolved expectation is evaluated on `c(U_t jm)Ω` and `c(U_t jn)Ω`.
pub fn fock_decay_expectation(
    g: &DhoGenerator,
    m: &RVec,
    n: &RVec,
    t: f64,
    grid: &HalfLineGrid,
    max_modes: usize,
) -> Result<C64> {
    if !(t >= 0.0) {
        return Err(invalid(format!("decay time must be non-negative, got {t}")));
    }
    check_vector(g, m)?;
    check_vector(g, n)?;
    let dim = g.space().dim();

    let oscillator: Vec<HalfLineFunction> = (0..dim)
        .map(|i| {
            let mut e = RVec::zeros(dim);
            e[i] = 1.0;
            inject_halfline(g, &e, grid)
        })
        .collect::<Result<_>>()?;
    let jm = inject_halfline(g, m, grid)?;
    let jn = inject_halfline(g, n, grid)?;
    let um = shift(&jm, t)?;
    let un = shift(&jn, t)?;

    let mut basis = Vec::new();
    orthonormalize(&mut basis, &oscillator, 1e-10)?;
    let oscillator_rank = basis.len();
    orthonormalize(&mut basis, &[um.clone(), un.clone()], 1e-10)?;
    let modes = basis.len();
    if modes > max_modes {
        return Err(Error::ResourceLimit(format!(
            "truncated subspace needs {modes} modes, limit is {max_modes}"
        )));
    }

    let coords = |f: &HalfLineFunction| -> Result<RVec> {
        let x = RVec::from_iterator(modes, basis.iter().map(|b| b.inner(f).unwrap_or(f64::NAN)));
        let mut residual = f.clone();
        for (b, c) in basis.iter().zip(x.iter()) {
            residual = residual.axpy(-c, b)?;
        }
        let res = residual.norm_sq().sqrt();
        if !(res <= REPRESENTATION_TOL * f.norm_sq().sqrt().max(1.0)) {
            return Err(Error::TruncationInsufficient { residual: res });
        }
        // Real vector in the (Re, Im) layout of the complexified subspace.
        Ok(linalg::realify_vec(&x.map(|v| C64::new(v, 0.0))))
    };
    for f in [&jm, &jn] {
        coords(f)?;
    }
    let xm = coords(&um)?;
    let xn = coords(&un)?;

    let rep = FockRep::new(modes)?;
    let sp = OneParticleSpace::standard(modes)?;
    let mut q_block = RMat::zeros(modes, modes);
    for i in 0..oscillator_rank {
        q_block[(i, i)] = 1.0;
    }
    let q = linalg::direct_sum(&q_block, &q_block);
    let q_tilde = second_quantize_projection(&rep, &sp, &q)?;

    let vacuum = rep.vacuum();
    let psi_m = creation(&rep, &sp, &xm)?.apply(&rep, &vacuum)?;
    let psi_n = creation(&rep, &sp, &xn)?.apply(&rep, &vacuum)?;
    Ok(psi_m.dotc(&q_tilde.apply(&psi_n)))
}
