//! Dense fermionic Fock representation over a finite one-particle space.
//!
//! The one-particle space is a real space with a complex structure `J`; the
//! complex inner product is `⟨m, n⟩ = g(m, n) + i g(Jm, n)`, conjugate-linear
//! in the first slot. Given a `J`-adapted orthonormal basis `e₁..e_d`, a vector
//! has complex coordinates `z_k = ⟨e_k, m⟩` and the creation operator is
//! `c(m) = Σ z_k c_k`.
//!
//! Occupation-number states are indexed lexicographically with mode 1 as the
//! most significant bit, and `c_k` carries the sign `(−1)^{N_{<k}}` of the
//! occupied modes preceding it.

use std::ops::{Add, Mul};

use crate::error::{invalid, Error, Result};
use crate::finite_dilation::BogoliubovPair;
use crate::linalg::{self, CMat, CVec, RMat, RVec, C64};

/// Largest number of modes for which dense operators are built.
pub const MAX_MODES: usize = 12;
/// Singular values below this count as kernel directions.
pub const KERNEL_THRESHOLD: f64 = 1e-8;
const STRUCTURE_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Real space with a complex structure and an adapted orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OneParticleSpace {
    j: RMat,
    basis: Vec<RVec>,
}

impl OneParticleSpace {
    /// Picks an adapted basis greedily from the standard unit vectors.
    pub fn new(j: RMat) -> Result<Self> {
        check_complex_structure(&j)?;
        let n = j.nrows();
        let mut basis: Vec<RVec> = Vec::with_capacity(n / 2);
        for i in 0..n {
            if basis.len() * 2 == n {
                break;
            }
            let mut r = RVec::zeros(n);
            r[i] = 1.0;
            // Two passes of Gram-Schmidt against span{e_k, J e_k}.
            for _ in 0..2 {
                for e in &basis {
                    let je = &j * e;
                    r -= e * e.dot(&r) + &je * je.dot(&r);
                }
            }
            let norm = r.norm();
            if norm > 1e-6 {
                basis.push(r / norm);
            }
        }
        if basis.len() * 2 != n {
            return Err(Error::Numerical("failed to build a J-adapted basis".into()));
        }
        Ok(Self { j, basis })
    }

    /// Uses a caller-provided adapted basis.
    pub fn with_basis(j: RMat, basis: Vec<RVec>) -> Result<Self> {
        check_complex_structure(&j)?;
        let n = j.nrows();
        if basis.len() * 2 != n || basis.iter().any(|e| e.len() != n) {
            return Err(invalid("adapted basis must have real_dim/2 vectors of length real_dim"));
        }
        let space = Self { j, basis };
        for (k, ek) in space.basis.iter().enumerate() {
            for (l, el) in space.basis.iter().enumerate() {
                let expected = if k == l { ONE } else { ZERO };
                if (space.inner(ek, el) - expected).norm() > STRUCTURE_TOL {
                    return Err(invalid("basis is not orthonormal in the complex inner product"));
                }
            }
        }
        Ok(space)
    }

    /// `ℂ^d` realified as `(Re z, Im z)` with the standard complex structure.
    pub fn standard(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(invalid("one-particle space needs at least one complex dimension"));
        }
        let j = linalg::realify(&CMat::from_diagonal_element(d, d, C64::new(0.0, 1.0)));
        Self::new(j)
    }

    pub fn real_dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn complex_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn j(&self) -> &RMat {
        &self.j
    }

    pub fn basis(&self) -> &[RVec] {
        &self.basis
    }

    /// `⟨m, n⟩ = g(m, n) + i g(Jm, n)`.
    pub fn inner(&self, m: &RVec, n: &RVec) -> C64 {
        C64::new(m.dot(n), (&self.j * m).dot(n))
    }

    /// Complex coordinates `z_k = ⟨e_k, m⟩`.
    pub fn coordinates(&self, m: &RVec) -> Result<CVec> {
        self.check_vector(m)?;
        Ok(CVec::from_iterator(self.complex_dim(), self.basis.iter().map(|e| self.inner(e, m))))
    }

    /// Inverse of [`coordinates`](Self::coordinates).
    pub fn from_coordinates(&self, z: &CVec) -> Result<RVec> {
        if z.len() != self.complex_dim() {
            return Err(invalid(format!(
                "expected {} complex coordinates, got {}",
                self.complex_dim(),
                z.len()
            )));
        }
        let mut v = RVec::zeros(self.real_dim());
        for (zk, e) in z.iter().zip(&self.basis) {
            v += e * zk.re + (&self.j * e) * zk.im;
        }
        Ok(v)
    }

    /// Matrix `⟨e_k, A e_l⟩` of a complex-linear real operator.
    pub fn complex_matrix(&self, a: &RMat) -> Result<CMat> {
        self.check_operator(a)?;
        let d = self.complex_dim();
        let images: Vec<RVec> = self.basis.iter().map(|e| a * e).collect();
        Ok(CMat::from_fn(d, d, |k, l| self.inner(&self.basis[k], &images[l])))
    }

    /// `‖AJ − JA‖_F`.
    pub fn linearity_defect(&self, a: &RMat) -> f64 {
        (a * &self.j - &self.j * a).norm()
    }

    fn check_vector(&self, m: &RVec) -> Result<()> {
        if m.len() != self.real_dim() {
            return Err(invalid(format!(
                "vector of length {} does not live in a real space of dimension {}",
                m.len(),
                self.real_dim()
            )));
        }
        Ok(())
    }

    fn check_operator(&self, a: &RMat) -> Result<()> {
        if a.shape() != self.j.shape() {
            return Err(invalid(format!(
                "operator {:?} does not act on a real space of dimension {}",
                a.shape(),
                self.real_dim()
            )));
        }
        Ok(())
    }
}

fn check_complex_structure(j: &RMat) -> Result<()> {
    let n = j.nrows();
    if !j.is_square() || n == 0 || n % 2 != 0 {
        return Err(invalid(format!("complex structure must be square of even size, got {:?}", j.shape())));
    }
    let sq = (j * j + RMat::identity(n, n)).norm();
    let skew = (j + j.transpose()).norm();
    if sq > STRUCTURE_TOL || skew > STRUCTURE_TOL {
        return Err(invalid(format!(
            "not an orthogonal complex structure (‖J²+1‖ = {sq:e}, ‖J+Jᵀ‖ = {skew:e})"
        )));
    }
    Ok(())
}

/// Dense Fock-space operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: CMat,
}

impl FockOperator {
    pub fn new(matrix: CMat) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMat::identity(dim, dim) }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix + &other.matrix * &self.matrix }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix }
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.matrix * v
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: Self) -> FockOperator {
        FockOperator { matrix: &self.matrix + &rhs.matrix }
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: Self) -> FockOperator {
        FockOperator { matrix: &self.matrix * &rhs.matrix }
    }
}

/// Fermionic Fock space over `modes` modes.
///
/// The ladder operators are generated on demand from the occupation bit
/// strings rather than stored densely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockRep {
    modes: usize,
}

impl FockRep {
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 || modes > MAX_MODES {
            return Err(Error::ResourceLimit(format!(
                "Fock space supports 1..={MAX_MODES} modes, requested {modes}"
            )));
        }
        Ok(Self { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        1 << self.modes
    }

    /// The empty state `(0, …, 0)`.
    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[0] = ONE;
        v
    }

    fn bit(&self, k: usize) -> usize {
        1 << (self.modes - 1 - k)
    }

    fn sign(&self, state: usize, k: usize) -> f64 {
        if (state >> (self.modes - k)).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Number of occupied modes in a basis state.
    pub fn particle_number(&self, state: usize) -> u32 {
        state.count_ones()
    }

    /// `c_k |state⟩` as `(target, sign)`, or `None` if mode `k` is occupied.
    pub fn raise(&self, k: usize, state: usize) -> Option<(usize, f64)> {
        let bit = self.bit(k);
        (state & bit == 0).then(|| (state | bit, self.sign(state, k)))
    }

    /// `c_k* |state⟩` as `(target, sign)`, or `None` if mode `k` is empty.
    pub fn lower(&self, k: usize, state: usize) -> Option<(usize, f64)> {
        let bit = self.bit(k);
        (state & bit != 0).then(|| (state ^ bit, self.sign(state, k)))
    }

    /// Dense creation operator `c_k` (0-based mode index).
    pub fn creator(&self, k: usize) -> FockOperator {
        assert!(k < self.modes, "mode {k} out of range");
        let mut m = CMat::zeros(self.dim(), self.dim());
        for s in 0..self.dim() {
            if let Some((t, sign)) = self.raise(k, s) {
                m[(t, s)] = C64::new(sign, 0.0);
            }
        }
        FockOperator::new(m)
    }

    /// Dense annihilation operator `c_k*`.
    pub fn annihilator(&self, k: usize) -> FockOperator {
        self.creator(k).adjoint()
    }

    /// Total number operator `Σ c_k c_k*`.
    pub fn number_operator(&self) -> FockOperator {
        let diag = CVec::from_fn(self.dim(), |s, _| C64::new(self.particle_number(s) as f64, 0.0));
        FockOperator::new(CMat::from_diagonal(&diag))
    }
}

/// Linear combination `Σ α_k c_k + Σ β_k c_k*` of ladder operators.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOperator {
    create: CVec,
    annihilate: CVec,
}

impl FieldOperator {
    pub fn new(create: CVec, annihilate: CVec) -> Result<Self> {
        if create.len() != annihilate.len() {
            return Err(invalid("field operator coefficient vectors differ in length"));
        }
        Ok(Self { create, annihilate })
    }

    pub fn creation_coefficients(&self) -> &CVec {
        &self.create
    }

    pub fn annihilation_coefficients(&self) -> &CVec {
        &self.annihilate
    }

    pub fn modes(&self) -> usize {
        self.create.len()
    }

    pub fn adjoint(&self) -> Self {
        Self { create: self.annihilate.conjugate(), annihilate: self.create.conjugate() }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { create: &self.create * z, annihilate: &self.annihilate * z }
    }

    /// Applies the operator to a Fock vector without forming its matrix.
    pub fn apply(&self, rep: &FockRep, v: &CVec) -> Result<CVec> {
        self.check(rep)?;
        if v.len() != rep.dim() {
            return Err(invalid(format!("Fock vector has length {}, expected {}", v.len(), rep.dim())));
        }
        let mut out = CVec::zeros(rep.dim());
        for (s, &amp) in v.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            for k in 0..rep.modes() {
                if let Some((t, sign)) = rep.raise(k, s) {
                    out[t] += self.create[k] * amp * sign;
                } else if let Some((t, sign)) = rep.lower(k, s) {
                    out[t] += self.annihilate[k] * amp * sign;
                }
            }
        }
        Ok(out)
    }

    pub fn to_operator(&self, rep: &FockRep) -> Result<FockOperator> {
        self.check(rep)?;
        let dim = rep.dim();
        let mut m = CMat::zeros(dim, dim);
        for s in 0..dim {
            for k in 0..rep.modes() {
                if let Some((t, sign)) = rep.raise(k, s) {
                    m[(t, s)] += self.create[k] * sign;
                } else if let Some((t, sign)) = rep.lower(k, s) {
                    m[(t, s)] += self.annihilate[k] * sign;
                }
            }
        }
        Ok(FockOperator::new(m))
    }

    fn check(&self, rep: &FockRep) -> Result<()> {
        if self.modes() != rep.modes() {
            return Err(invalid(format!(
                "field operator over {} modes used with a {}-mode Fock space",
                self.modes(),
                rep.modes()
            )));
        }
        Ok(())
    }
}

impl Add for &FieldOperator {
    type Output = FieldOperator;
    fn add(self, rhs: Self) -> FieldOperator {
        FieldOperator { create: &self.create + &rhs.create, annihilate: &self.annihilate + &rhs.annihilate }
    }
}

fn check_dims(rep: &FockRep, sp: &OneParticleSpace) -> Result<()> {
    if rep.modes() != sp.complex_dim() {
        return Err(invalid(format!(
            "Fock space has {} modes but the one-particle space has complex dimension {}",
            rep.modes(),
            sp.complex_dim()
        )));
    }
    Ok(())
}

/// `c(m) = Σ_k ⟨e_k, m⟩ c_k`.
pub fn creation(rep: &FockRep, sp: &OneParticleSpace, m: &RVec) -> Result<FieldOperator> {
    check_dims(rep, sp)?;
    let z = sp.coordinates(m)?;
    Ok(FieldOperator { annihilate: CVec::zeros(z.len()), create: z })
}

/// `c_t(m) = c(a m) + c(b m)*`.
pub fn transformed_creation(
    rep: &FockRep,
    sp: &OneParticleSpace,
    pair: &BogoliubovPair,
    m: &RVec,
) -> Result<FieldOperator> {
    check_dims(rep, sp)?;
    if pair.dim() != sp.real_dim() {
        return Err(invalid(format!(
            "Bogoliubov pair acts on dimension {}, one-particle space has {}",
            pair.dim(),
            sp.real_dim()
        )));
    }
    sp.check_vector(m)?;
    let linear = creation(rep, sp, &(pair.a() * m))?;
    let conjugate = creation(rep, sp, &(pair.b() * m))?.adjoint();
    Ok(&linear + &conjugate)
}

/// The transformed family `c_t(e_k)` over the adapted basis.
pub fn transformed_family(
    rep: &FockRep,
    sp: &OneParticleSpace,
    pair: &BogoliubovPair,
) -> Result<Vec<FieldOperator>> {
    sp.basis().iter().map(|e| transformed_creation(rep, sp, pair, e)).collect()
}

/// Unit vector annihilated by every `c_t(e_k)*`.
///
/// Found as the right-singular vector of the stacked annihilator matrices
/// with the smallest singular value; the phase is fixed so the largest
/// component is real and positive.
pub fn transformed_vacuum(rep: &FockRep, sp: &OneParticleSpace, pair: &BogoliubovPair) -> Result<CVec> {
    let family = transformed_family(rep, sp, pair)?;
    let dim = rep.dim();
    let mut stacked = CMat::zeros(dim * family.len(), dim);
    for (k, op) in family.iter().enumerate() {
        let ann = op.adjoint().to_operator(rep)?;
        stacked.view_mut((k * dim, 0), (dim, dim)).copy_from(ann.matrix());
    }
    let svd = stacked.svd(false, true);
    let (idx, smallest) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty Fock space");
    if smallest > KERNEL_THRESHOLD {
        return Err(Error::DegenerateTransformation { smallest_singular_value: smallest });
    }
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut omega: CVec = v_t.row(idx).adjoint();
    let pivot = omega
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("non-empty vector");
    omega *= pivot.conj() / pivot.norm();
    let norm = omega.norm();
    Ok(omega / C64::new(norm, 0.0))
}

/// Largest `‖c_t(e_k)* Ω‖` over the transformed family.
pub fn annihilation_residual(
    rep: &FockRep,
    sp: &OneParticleSpace,
    pair: &BogoliubovPair,
    omega: &CVec,
) -> Result<f64> {
    let family = transformed_family(rep, sp, pair)?;
    let mut worst = 0.0_f64;
    for op in &family {
        worst = worst.max(op.adjoint().apply(rep, omega)?.norm());
    }
    Ok(worst)
}

/// `dΓ(A) = Σ_{kl} ⟨e_k, A e_l⟩ c_k c_l*` for a complex-linear `A`.
pub fn second_quantize(rep: &FockRep, sp: &OneParticleSpace, a: &RMat) -> Result<FockOperator> {
    check_dims(rep, sp)?;
    sp.check_operator(a)?;
    let defect = sp.linearity_defect(a);
    if defect > STRUCTURE_TOL * a.norm().max(1.0) {
        return Err(invalid(format!("operator is not complex-linear (‖AJ − JA‖ = {defect:e})")));
    }
    let q = sp.complex_matrix(a)?;
    let dim = rep.dim();
    let mut m = CMat::zeros(dim, dim);
    for s in 0..dim {
        for l in 0..rep.modes() {
            let Some((s1, sign1)) = rep.lower(l, s) else { continue };
            for k in 0..rep.modes() {
                if let Some((s2, sign2)) = rep.raise(k, s1) {
                    m[(s2, s)] += q[(k, l)] * (sign1 * sign2);
                }
            }
        }
    }
    Ok(FockOperator::new(m))
}

/// Second quantization of an orthogonal, complex-linear projection.
pub fn second_quantize_projection(rep: &FockRep, sp: &OneParticleSpace, q: &RMat) -> Result<FockOperator> {
    sp.check_operator(q)?;
    let idem = (q * q - q).norm();
    let sym = (q - q.transpose()).norm();
    if idem > STRUCTURE_TOL || sym > STRUCTURE_TOL {
        return Err(invalid(format!(
            "not an orthogonal projection (‖Q²−Q‖ = {idem:e}, ‖Q−Qᵀ‖ = {sym:e})"
        )));
    }
    second_quantize(rep, sp, q)
}

/// `⟨Ω, A Ω⟩`.
pub fn vacuum_expectation(rep: &FockRep, a: &FockOperator) -> Result<C64> {
    if a.dim() != rep.dim() {
        return Err(invalid(format!("operator of size {} on a Fock space of size {}", a.dim(), rep.dim())));
    }
    Ok(a.matrix()[(0, 0)])
}

/// Largest Frobenius residual of the CAR over a family of creation operators:
/// `{c_k*, c_l} = δ_kl` and `{c_k, c_l} = 0`.
pub fn car_residual(family: &[FockOperator]) -> f64 {
    let mut worst = 0.0_f64;
    for (k, ck) in family.iter().enumerate() {
        let ck_adj = ck.adjoint();
        for (l, cl) in family.iter().enumerate() {
            let mixed = ck_adj.anticommutator(cl).into_matrix();
            let expected = if k == l { CMat::identity(cl.dim(), cl.dim()) } else { CMat::zeros(cl.dim(), cl.dim()) };
            worst = worst.max((mixed - expected).norm());
            worst = worst.max(ck.anticommutator(cl).matrix().norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_dilation::{dilate_propagator, split_operator};
    use crate::phase_space::{DhoGenerator, PhaseSpace};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_mode_creator() {
        let rep = FockRep::new(1).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]);
        assert_eq!(rep.creator(0).matrix(), &expected);
    }

    #[test]
    fn mode_count_limits() {
        assert!(matches!(FockRep::new(0), Err(Error::ResourceLimit(_))));
        assert!(matches!(FockRep::new(MAX_MODES + 1), Err(Error::ResourceLimit(_))));
        assert!(FockRep::new(MAX_MODES).is_ok());
    }

    #[test]
    fn two_mode_number_relation() {
        let rep = FockRep::new(2).unwrap();
        let c = rep.creator(0);
        let sum = &(&c.adjoint() * &c) + &(&c * &c.adjoint());
        assert_eq!(sum.matrix(), &CMat::identity(4, 4));
    }

    #[test]
    fn three_modes_all_twenty_one_anticommutators() {
        let rep = FockRep::new(3).unwrap();
        let mut ops: Vec<(bool, usize, FockOperator)> = Vec::new();
        for k in 0..3 {
            ops.push((true, k, rep.creator(k)));
            ops.push((false, k, rep.annihilator(k)));
        }
        let mut checked = 0;
        for i in 0..ops.len() {
            for j in i..ops.len() {
                let (ci, ki, a) = &ops[i];
                let (cj, kj, b) = &ops[j];
                let expected = if ci != cj && ki == kj { CMat::identity(8, 8) } else { CMat::zeros(8, 8) };
                assert!((a.anticommutator(b).into_matrix() - expected).norm() < 1e-13);
                checked += 1;
            }
        }
        assert_eq!(checked, 21);
    }

    #[test]
    fn vacuum_is_annihilated() {
        let rep = FockRep::new(4).unwrap();
        for k in 0..4 {
            assert_eq!(rep.annihilator(k).apply(&rep.vacuum()).norm(), 0.0);
        }
    }

    #[test]
    fn creators_raise_particle_number_by_one() {
        let rep = FockRep::new(4).unwrap();
        for k in 0..4 {
            let c = rep.creator(k);
            for t in 0..rep.dim() {
                for s in 0..rep.dim() {
                    if c.matrix()[(t, s)] != ZERO {
                        assert_eq!(rep.particle_number(t), rep.particle_number(s) + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn adapted_basis_for_doubled_structure() {
        let ps = PhaseSpace::new(2).unwrap();
        let jt = crate::finite_dilation::DoubledSpace::new(&ps).jt().clone();
        let sp = OneParticleSpace::new(jt).unwrap();
        assert_eq!(sp.complex_dim(), 4);
        for (k, e) in sp.basis().iter().enumerate() {
            for (l, f) in sp.basis().iter().enumerate() {
                let expected = if k == l { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(sp.inner(e, f).re, expected, epsilon = 1e-15);
                assert_abs_diff_eq!(sp.inner(e, f).im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn inner_product_slot_conventions() {
        let sp = OneParticleSpace::standard(2).unwrap();
        let m = RVec::from_vec(vec![0.3, -1.0, 0.7, 0.2]);
        let n = RVec::from_vec(vec![1.1, 0.4, -0.5, 0.9]);
        let i = C64::new(0.0, 1.0);
        let jm = sp.j() * &m;
        let jn = sp.j() * &n;
        assert_abs_diff_eq!((sp.inner(&jm, &n) + i * sp.inner(&m, &n)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((sp.inner(&m, &jn) - i * sp.inner(&m, &n)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn non_complex_structure_rejected() {
        assert!(OneParticleSpace::new(RMat::identity(2, 2)).is_err());
        assert!(OneParticleSpace::new(RMat::zeros(3, 3)).is_err());
    }

    #[test]
    fn basis_creation_and_linearity() {
        let rep = FockRep::new(2).unwrap();
        let sp = OneParticleSpace::standard(2).unwrap();
        let e1 = sp.basis()[0].clone();
        let c1 = creation(&rep, &sp, &e1).unwrap().to_operator(&rep).unwrap();
        assert_eq!(c1, rep.creator(0));

        let cj = creation(&rep, &sp, &(sp.j() * &e1)).unwrap().to_operator(&rep).unwrap();
        let expected = rep.creator(0).matrix() * C64::new(0.0, 1.0);
        assert!((cj.into_matrix() - expected).norm() < 1e-14);
    }

    #[test]
    fn creation_dimension_mismatch() {
        let rep = FockRep::new(2).unwrap();
        let sp = OneParticleSpace::standard(2).unwrap();
        assert!(creation(&rep, &sp, &RVec::zeros(3)).is_err());
        let rep3 = FockRep::new(3).unwrap();
        assert!(creation(&rep3, &sp, &RVec::zeros(4)).is_err());
    }

    #[test]
    fn identity_pair_is_untransformed() {
        let rep = FockRep::new(2).unwrap();
        let sp = OneParticleSpace::standard(2).unwrap();
        let pair = BogoliubovPair::new(RMat::identity(4, 4), RMat::zeros(4, 4)).unwrap();
        let m = RVec::from_vec(vec![0.2, 0.5, -0.1, 0.7]);
        assert_eq!(
            transformed_creation(&rep, &sp, &pair, &m).unwrap(),
            creation(&rep, &sp, &m).unwrap()
        );
        let omega = transformed_vacuum(&rep, &sp, &pair).unwrap();
        assert!((omega - rep.vacuum()).norm() < 1e-12);
    }

    /// Complex conjugation `(Re z, Im z) ↦ (Re z, −Im z)` anticommutes with `J`.
    fn conjugation(d: usize) -> RMat {
        linalg::direct_sum(&RMat::identity(d, d), &(-RMat::identity(d, d)))
    }

    #[test]
    fn particle_hole_swap() {
        let rep = FockRep::new(2).unwrap();
        let sp = OneParticleSpace::standard(2).unwrap();
        let pair = BogoliubovPair::new(RMat::zeros(4, 4), conjugation(2)).unwrap();
        let family: Vec<FockOperator> = transformed_family(&rep, &sp, &pair)
            .unwrap()
            .iter()
            .map(|f| f.to_operator(&rep).unwrap())
            .collect();
        assert_eq!(family[0], rep.annihilator(0));
        assert!(car_residual(&family) < 1e-14);

        let omega = transformed_vacuum(&rep, &sp, &pair).unwrap();
        let mut full = CVec::zeros(4);
        full[3] = ONE;
        assert!((omega - full).norm() < 1e-12);
    }

    #[test]
    fn dho_pair_preserves_car_and_has_vacuum() {
        let g = DhoGenerator::new(&PhaseSpace::new(1).unwrap(), 1.0, 0.5).unwrap();
        let (_, pair) = dilate_propagator(&g, 1.0).unwrap();
        let jt = crate::finite_dilation::DoubledSpace::new(g.space()).jt().clone();
        let sp = OneParticleSpace::new(jt).unwrap();
        let rep = FockRep::new(2).unwrap();
        let family: Vec<FockOperator> = transformed_family(&rep, &sp, &pair)
            .unwrap()
            .iter()
            .map(|f| f.to_operator(&rep).unwrap())
            .collect();
        assert!(car_residual(&family) < 1e-10);

        let omega = transformed_vacuum(&rep, &sp, &pair).unwrap();
        assert_abs_diff_eq!(omega.norm(), 1.0, epsilon = 1e-12);
        assert!(annihilation_residual(&rep, &sp, &pair, &omega).unwrap() < 1e-9);
    }

    #[test]
    fn split_of_non_orthogonal_map_has_no_vacuum() {
        // diag(1, 2) is not orthogonal and has both parts non-zero, so the
        // single transformed annihilator has no kernel.
        let rep = FockRep::new(1).unwrap();
        let sp = OneParticleSpace::standard(1).unwrap();
        let pair = split_operator(&RMat::from_diagonal(&RVec::from_vec(vec![1.0, 2.0])), sp.j()).unwrap();
        assert!(matches!(
            transformed_vacuum(&rep, &sp, &pair),
            Err(Error::DegenerateTransformation { .. })
        ));
    }

    #[test]
    fn second_quantized_identity_is_number_operator() {
        let rep = FockRep::new(3).unwrap();
        let sp = OneParticleSpace::standard(3).unwrap();
        let n = second_quantize_projection(&rep, &sp, &RMat::identity(6, 6)).unwrap();
        assert_eq!(n, rep.number_operator());
        let zero = second_quantize_projection(&rep, &sp, &RMat::zeros(6, 6)).unwrap();
        assert_eq!(zero.matrix(), &CMat::zeros(8, 8));
    }

    #[test]
    fn second_quantize_rejects_bad_projections() {
        let rep = FockRep::new(1).unwrap();
        let sp = OneParticleSpace::standard(1).unwrap();
        let not_proj = RMat::identity(2, 2) * 0.5;
        assert!(second_quantize_projection(&rep, &sp, &not_proj).is_err());
        // Projection onto the real axis does not commute with J.
        let real_axis = RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(second_quantize_projection(&rep, &sp, &real_axis).is_err());
    }

    #[test]
    fn vacuum_expectations() {
        let rep = FockRep::new(2).unwrap();
        let sp = OneParticleSpace::standard(2).unwrap();
        let m = RVec::from_vec(vec![0.6, -0.2, 0.3, 0.5]);
        let c = creation(&rep, &sp, &m).unwrap().to_operator(&rep).unwrap();
        let id = FockOperator::identity(rep.dim());
        assert_eq!(vacuum_expectation(&rep, &id).unwrap(), ONE);
        assert_eq!(vacuum_expectation(&rep, &(&c * &c.adjoint())).unwrap(), ZERO);
        let filled = vacuum_expectation(&rep, &(&c.adjoint() * &c)).unwrap();
        assert_abs_diff_eq!((filled - sp.inner(&m, &m)).norm(), 0.0, epsilon = 1e-14);
        assert!(vacuum_expectation(&rep, &FockOperator::identity(8)).is_err());
    }

    #[test]
    fn field_apply_matches_dense() {
        let rep = FockRep::new(3).unwrap();
        let f = FieldOperator::new(
            CVec::from_vec(vec![C64::new(0.1, 0.2), C64::new(-1.0, 0.0), C64::new(0.0, 0.5)]),
            CVec::from_vec(vec![C64::new(0.3, 0.0), C64::new(0.0, -0.4), C64::new(2.0, 1.0)]),
        )
        .unwrap();
        let v = CVec::from_fn(8, |i, _| C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05));
        let dense = f.to_operator(&rep).unwrap().apply(&v);
        let sparse = f.apply(&rep, &v).unwrap();
        assert!((dense - sparse).norm() < 1e-14);
    }
}
