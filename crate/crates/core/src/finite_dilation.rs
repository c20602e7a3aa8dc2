//! Fixed-time doubling of the phase space.
//!
//! A contraction `T` on `M` becomes the orthogonal block operator
//!
//! ```text
//! U = [ T             (1 − TTᵀ)^{1/2} ]
//!     [ (1 − TᵀT)^{1/2}      −Tᵀ      ]
//! ```
//!
//! on `M ⊕ M`, with `j*Uj = T` for the injection `jm = m ⊕ 0`. Relative to the
//! doubled complex structure `J ⊕ (−J)` the dilation splits into a
//! complex-linear part `a` and a conjugate-linear part `b`; the latter decides
//! whether the induced Bogoliubov transformation is implementable.

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, RMat, RVec};
use crate::phase_space::{DhoGenerator, PhaseSpace};

/// Contractions with `σ_max` above `1 + CONTRACTION_TOL` are rejected.
pub const CONTRACTION_TOL: f64 = 1e-6;

/// `M ⊕ M` with complex structure `J ⊕ (−J)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledSpace {
    base: PhaseSpace,
    jt: RMat,
}

impl DoubledSpace {
    pub fn new(base: &PhaseSpace) -> Self {
        let jt = linalg::direct_sum(base.j(), &(-base.j()));
        Self { base: base.clone(), jt }
    }

    pub fn base(&self) -> &PhaseSpace {
        &self.base
    }

    pub fn dim(&self) -> usize {
        2 * self.base.dim()
    }

    /// The doubled complex structure `J ⊕ (−J)`.
    pub fn jt(&self) -> &RMat {
        &self.jt
    }

    /// `m ↦ m ⊕ 0`.
    pub fn inject(&self, m: &RVec) -> Result<RVec> {
        if m.len() != self.base.dim() {
            return Err(invalid(format!(
                "inject: expected a vector of length {}, got {}",
                self.base.dim(),
                m.len()
            )));
        }
        Ok(inject_doubled(m))
    }

    /// Adjoint of [`inject`](Self::inject): restriction to the first summand.
    pub fn restrict(&self, v: &RVec) -> Result<RVec> {
        if v.len() != self.dim() {
            return Err(invalid(format!(
                "restrict: expected a vector of length {}, got {}",
                self.dim(),
                v.len()
            )));
        }
        Ok(v.rows(0, self.base.dim()).into_owned())
    }
}

/// `m ↦ m ⊕ 0` for a vector of any length.
pub fn inject_doubled(m: &RVec) -> RVec {
    let n = m.len();
    let mut out = RVec::zeros(2 * n);
    out.rows_mut(0, n).copy_from(m);
    out
}

/// Orthogonal dilation of a contraction together with its defect operators.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDilation {
    t: RMat,
    u: RMat,
    defect_top: RMat,
    defect_bot: RMat,
}

impl BlockDilation {
    /// The (possibly clipped) contraction sitting in the top-left block.
    pub fn contraction(&self) -> &RMat {
        &self.t
    }

    pub fn u(&self) -> &RMat {
        &self.u
    }

    /// `(1 − TTᵀ)^{1/2}`.
    pub fn defect_top(&self) -> &RMat {
        &self.defect_top
    }

    /// `(1 − TᵀT)^{1/2}`.
    pub fn defect_bot(&self) -> &RMat {
        &self.defect_bot
    }

    /// `j* U j`, the top-left block of `U`.
    pub fn compress(&self) -> RMat {
        let m = self.t.nrows();
        self.u.view((0, 0), (m, m)).into_owned()
    }

    /// `‖UᵀU − 1‖_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.u.nrows();
        (self.u.transpose() * &self.u - RMat::identity(n, n)).norm()
    }
}

/// Defect eigenvalues up to this are rounding noise and get a zero root.
pub const DEFECT_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Builds the orthogonal block dilation of `t`.
///
/// Singular values above one by more than the square-root clamp allows (up
/// to `1 + CONTRACTION_TOL`) are pulled back to one by rank-one corrections.
pub fn dilate_contraction(t: &RMat) -> Result<BlockDilation> {
    if !t.is_square() || t.nrows() == 0 {
        return Err(invalid(format!("dilate: expected a non-empty square matrix, got {:?}", t.shape())));
    }
    let m = t.nrows();
    let svd = t.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if !sigma_max.is_finite() || sigma_max > 1.0 + CONTRACTION_TOL {
        return Err(Error::NotAContraction { sigma_max });
    }
    let mut t = t.clone();
    let (w, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if 1.0 - s * s < -linalg::PSD_CLAMP / 2.0 {
            t -= w.column(k) * vt.row(k) * (s - 1.0);
        }
    }

    let ident = RMat::identity(m, m);
    let defect_top = linalg::sqrt_psd_floored(&(&ident - &t * t.transpose()), DEFECT_FLOOR)?;
    let defect_bot = linalg::sqrt_psd_floored(&(&ident - t.transpose() * &t), DEFECT_FLOOR)?;

    let mut u = RMat::zeros(2 * m, 2 * m);
    u.view_mut((0, 0), (m, m)).copy_from(&t);
    u.view_mut((0, m), (m, m)).copy_from(&defect_top);
    u.view_mut((m, 0), (m, m)).copy_from(&defect_bot);
    u.view_mut((m, m), (m, m)).copy_from(&(-t.transpose()));

    Ok(BlockDilation { t, u, defect_top, defect_bot })
}

/// Complex-linear (`a`) and conjugate-linear (`b`) parts of a real operator.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovPair {
    a: RMat,
    b: RMat,
}

impl BogoliubovPair {
    pub fn new(a: RMat, b: RMat) -> Result<Self> {
        if a.shape() != b.shape() || !a.is_square() {
            return Err(invalid("bogoliubov pair: a and b must be square and the same size"));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &RMat {
        &self.a
    }

    pub fn b(&self) -> &RMat {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `a + b`.
    pub fn reconstruct(&self) -> RMat {
        &self.a + &self.b
    }
}

/// Splits `u` relative to a complex structure `jt`:
/// `a = (u − jt·u·jt)/2`, `b = (u + jt·u·jt)/2`.
pub fn split_operator(u: &RMat, jt: &RMat) -> Result<BogoliubovPair> {
    if u.shape() != jt.shape() || !u.is_square() {
        return Err(invalid(format!(
            "split: operator {:?} and complex structure {:?} disagree",
            u.shape(),
            jt.shape()
        )));
    }
    let conj = jt * u * jt;
    let a = (u - &conj) * 0.5;
    let b = (u + &conj) * 0.5;
    Ok(BogoliubovPair { a, b })
}

/// Bogoliubov split of a block dilation relative to the doubled structure.
pub fn bogoliubov_split(d: &BlockDilation, ds: &DoubledSpace) -> Result<BogoliubovPair> {
    split_operator(d.u(), ds.jt())
}

/// Squared Hilbert-Schmidt norm on the realified space, `Σ bᵢⱼ²`.
pub fn hs_norm_sq(b: &RMat) -> f64 {
    b.norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Implementability {
    /// Finite Hilbert-Schmidt norm; always the case for a finite matrix.
    pub implementable: bool,
    pub hs_norm_sq: f64,
    /// Diagnostic: the norm exceeds the caller's reporting threshold.
    pub exceeds_threshold: bool,
}

/// Shale-Stinespring criterion restricted to finite matrices.
pub fn implementable(b: &RMat, threshold: f64) -> Result<Implementability> {
    if !(threshold > 0.0) {
        return Err(invalid(format!("implementable: threshold must be positive, got {threshold}")));
    }
    let norm = hs_norm_sq(b);
    Ok(Implementability {
        implementable: norm.is_finite(),
        hs_norm_sq: norm,
        exceeds_threshold: norm > threshold,
    })
}

/// Dilation and split of `T_t` for an oscillator generator.
pub fn dilate_propagator(g: &DhoGenerator, t: f64) -> Result<(BlockDilation, BogoliubovPair)> {
    let tt = g.evolve_closed_form(t)?;
    let dilation = dilate_contraction(tt.matrix())?;
    let pair = bogoliubov_split(&dilation, &DoubledSpace::new(g.space()))?;
    Ok((dilation, pair))
}

/// `‖b_{U_t}‖²_HS` for identical oscillators at each mode count in `modes`.
pub fn hs_scaling(omega: f64, gamma: f64, t: f64, modes: &[usize]) -> Result<Vec<(usize, f64)>> {
    modes
        .iter()
        .map(|&n| {
            let g = DhoGenerator::new(&PhaseSpace::new(n)?, omega, gamma)?;
            let (_, pair) = dilate_propagator(&g, t)?;
            Ok((n, hs_norm_sq(pair.b())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dho(n: usize, omega: f64, gamma: f64) -> DhoGenerator {
        DhoGenerator::new(&PhaseSpace::new(n).unwrap(), omega, gamma).unwrap()
    }

    #[test]
    fn inject_and_restrict() {
        let ds = DoubledSpace::new(&PhaseSpace::new(1).unwrap());
        let m = RVec::from_vec(vec![1.0, 0.0]);
        let jm = ds.inject(&m).unwrap();
        assert_eq!(jm, RVec::from_vec(vec![1.0, 0.0, 0.0, 0.0]));
        let v = RVec::from_vec(vec![0.3, -0.2, 5.0, 7.0]);
        assert_eq!(ds.restrict(&v).unwrap(), RVec::from_vec(vec![0.3, -0.2]));
        assert!(ds.inject(&RVec::zeros(3)).is_err());
        assert!(ds.restrict(&RVec::zeros(2)).is_err());
    }

    #[test]
    fn doubled_structure_is_complex() {
        let ds = DoubledSpace::new(&PhaseSpace::new(3).unwrap());
        let id = RMat::identity(ds.dim(), ds.dim());
        assert_eq!(ds.jt() * ds.jt(), -&id);
        assert_eq!(ds.jt().transpose(), -ds.jt());
    }

    #[test]
    fn zero_contraction_dilates_to_swap() {
        let d = dilate_contraction(&RMat::zeros(1, 1)).unwrap();
        assert_eq!(d.u(), &RMat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn identity_dilates_to_reflection() {
        let d = dilate_contraction(&RMat::identity(3, 3)).unwrap();
        let expected = linalg::direct_sum(&RMat::identity(3, 3), &(-RMat::identity(3, 3)));
        assert_eq!(d.u(), &expected);
    }

    #[test]
    fn damped_propagator_dilation() {
        let g = dho(1, 1.0, 0.5);
        let t = g.evolve_closed_form(1.0).unwrap();
        let d = dilate_contraction(t.matrix()).unwrap();
        assert!(d.orthogonality_residual() < 1e-10);
        assert_eq!(d.compress(), *t.matrix());

        // Defect roots recomputed independently by eigendecomposition.
        let ident = RMat::identity(2, 2);
        let eig = (&ident - t.matrix().transpose() * t.matrix()).symmetric_eigen();
        let roots = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
        let oracle = &eig.eigenvectors * RMat::from_diagonal(&roots) * eig.eigenvectors.transpose();
        assert_abs_diff_eq!((oracle - d.defect_bot()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn defects_are_symmetric_psd() {
        let g = dho(2, 1.7, 0.3);
        let (d, _) = dilate_propagator(&g, 0.8).unwrap();
        for defect in [d.defect_top(), d.defect_bot()] {
            assert_abs_diff_eq!((defect - defect.transpose()).norm(), 0.0, epsilon = 1e-14);
            assert!(defect.clone().symmetric_eigen().eigenvalues.iter().all(|&x| x > -1e-12));
        }
    }

    #[test]
    fn slight_excess_is_clipped_large_excess_rejected() {
        let t = RMat::identity(2, 2) * (1.0 + 1e-9);
        let d = dilate_contraction(&t).unwrap();
        assert!(d.orthogonality_residual() < 1e-10);
        assert!((d.compress() - &t).norm() < 1e-8);

        let t = RMat::identity(2, 2) * 1.01;
        assert!(matches!(dilate_contraction(&t), Err(Error::NotAContraction { .. })));
    }

    #[test]
    fn rotation_has_no_conjugate_linear_part() {
        let g = dho(1, 1.0, 0.0);
        let (_, pair) = dilate_propagator(&g, 0.9).unwrap();
        assert!(hs_norm_sq(pair.b()) < 1e-24);
    }

    #[test]
    fn damping_forces_conjugate_linear_part() {
        let g = dho(1, 1.0, 0.5);
        let (d, pair) = dilate_propagator(&g, 1.0).unwrap();
        assert!(pair.b().norm() > 0.01);
        assert!((pair.reconstruct() - d.u()).norm() <= 4.0 * f64::EPSILON * d.u().norm());
        let jt = DoubledSpace::new(g.space()).jt().clone();
        assert!((pair.a() * &jt - &jt * pair.a()).norm() < 1e-12);
        assert!((pair.b() * &jt + &jt * pair.b()).norm() < 1e-12);
    }

    #[test]
    fn undamped_propagator_has_no_defect() {
        for t in [0.25, 1.0, 3.7] {
            let (d, pair) = dilate_propagator(&dho(2, 1.3, 0.0), t).unwrap();
            assert_eq!(d.defect_top().norm(), 0.0);
            assert_eq!(d.defect_bot().norm(), 0.0);
            assert_eq!(hs_norm_sq(pair.b()), 0.0);
        }
    }

    #[test]
    fn ill_conditioned_contraction_stays_orthogonal() {
        let t = dho(1, 0.5, 1.0).evolve_closed_form(10.0).unwrap().into_matrix();
        let d = dilate_contraction(&t).unwrap();
        assert_eq!(d.compress(), t);
        assert!(d.orthogonality_residual() < 1e-13);
    }

    #[test]
    fn hs_norm_scales_with_modes() {
        let norms = hs_scaling(1.0, 0.5, 1.0, &[1, 2, 4, 8]).unwrap();
        let base = norms[0].1;
        assert!(base > 0.0);
        for (n, v) in &norms {
            assert!((v / base - *n as f64).abs() < 1e-10 * *n as f64, "n = {n}");
        }
    }

    #[test]
    fn implementable_in_finite_dimension() {
        let r = implementable(&RMat::zeros(4, 4), 1.0).unwrap();
        assert!(r.implementable);
        assert_eq!(r.hs_norm_sq, 0.0);
        assert!(!r.exceeds_threshold);

        let g = dho(1, 1.0, 0.5);
        let (_, pair) = dilate_propagator(&g, 1.0).unwrap();
        let r = implementable(pair.b(), 1e-3).unwrap();
        assert!(r.implementable && r.exceeds_threshold);
        assert!(implementable(pair.b(), 0.0).is_err());
    }

    #[test]
    fn split_rejects_mismatched_shapes() {
        assert!(split_operator(&RMat::identity(4, 4), &RMat::identity(2, 2)).is_err());
    }
}
