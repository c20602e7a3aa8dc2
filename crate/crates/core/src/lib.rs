//! Quantization of the damped harmonic oscillator by two routes.
//!
//! * [`phase_space`]: the classical generator `Z = ωJ − 2γP` and its
//!   contraction semigroup, in closed form and via a generic exponential.
//! * [`finite_dilation`]: fixed-time orthogonal dilation on `M ⊕ M` and its
//!   Bogoliubov split.
//! * [`car_fock`]: dense fermionic Fock representations, transformed
//!   creation operators and vacua, second quantization.
//! * [`quasifree`]: gauge-invariant quasifree and thermal (KMS) states and
//!   their doubled Fock representation.
//! * [`semigroup_dilation`]: the unitary shift dilation of the whole
//!   semigroup on a sampled `L²(ℝ, PM)`, with spectra and decay curves.

pub mod car_fock;
pub mod error;
pub mod finite_dilation;
pub mod linalg;
pub mod phase_space;
pub mod quasifree;
pub mod semigroup_dilation;

pub use error::{Error, Result};
pub use finite_dilation::{BlockDilation, BogoliubovPair, DoubledSpace};
pub use car_fock::{FieldOperator, FockOperator, FockRep, OneParticleSpace};
pub use phase_space::{DampingRegime, DhoGenerator, PhaseSpace, Propagator};
pub use quasifree::{EvolutionConvention, QuasifreeState, StateDilation};
pub use semigroup_dilation::{HalfLineFunction, HalfLineGrid, SpectralAmplitude};
