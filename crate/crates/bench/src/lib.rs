//! Fixtures shared by the benchmarks.

use dho_core::linalg::RVec;
use dho_core::{DhoGenerator, HalfLineGrid, PhaseSpace};

pub fn generator(n_modes: usize, omega: f64, gamma: f64) -> DhoGenerator {
    DhoGenerator::new(&PhaseSpace::new(n_modes).expect("mode count"), omega, gamma).expect("parameters")
}

/// Unit vector with alternating signs.
pub fn probe(dim: usize) -> RVec {
    let v = RVec::from_fn(dim, |i, _| if i % 2 == 0 { 1.0 } else { -0.5 });
    let n = v.norm();
    v / n
}

pub fn grid(dt: f64, t_max: f64, max_shift: f64) -> HalfLineGrid {
    HalfLineGrid::new(dt, t_max, max_shift).expect("grid")
}
