//! Single trapped spin-1/2 atom in a programmable magnetic-field gradient.
//!
//! A linear field gradient, after exchanging position and momentum, acts on
//! the atom as a position-independent non-Abelian gauge potential. This crate
//! maps field configurations to dimensionless couplings ([`gauge`]), builds the
//! resulting two-oscillator ⊗ spin Hamiltonian in a truncated Fock basis
//! ([`hilbert`], [`dynamics`]), and checks the exact dynamics against the
//! first-order Heisenberg-picture predictions ([`oracle`]).
//!
//! Units: energies in ħω, times in 1/ω, lengths in x₀ = √(ħ/mω), momenta in
//! p₀ = √(ħmω).

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod gauge;
pub mod hilbert;
pub mod linalg;
pub mod oracle;

pub use error::{Result, SimError};
pub use exec::Execution;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
