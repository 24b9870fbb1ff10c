//! Truncated two-oscillator ⊗ spin-1/2 Hilbert space.
//!
//! Basis states are |n m s⟩ with n, m ∈ [0, n_max] counting quanta of the
//! y-oscillator (operator a) and z-oscillator (operator b), and s = ±1 the σ_z
//! eigenvalue. The s = +1 block comes first, so |0 0 +⟩ is flat index 0.

mod operators;
mod spectral;
mod states;

pub use operators::{ladder_lower, pauli, quadrature, ComplexMatrix, HermitianOperator};
pub use spectral::{eigendecompose, EigenDecomposition, Propagator};
pub use states::{
    coherent_state, expectation, fock_state, CoherentState, StateVector, EXPECTATION_IMAG_TOL, TAIL_WARN,
};

use serde::{Deserialize, Serialize};

use crate::{Result, SimError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisSpec {
    /// Largest occupation kept for each oscillator (inclusive).
    pub n_max: usize,
}

impl BasisSpec {
    pub fn new(n_max: usize) -> Self {
        BasisSpec { n_max }
    }

    /// Number of Fock levels per oscillator.
    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.levels() * self.levels()
    }

    pub fn flat(&self, idx: BasisIndex) -> Result<usize> {
        if idx.n > self.n_max || idx.m > self.n_max {
            return Err(SimError::Range(format!(
                "|{} {} {}⟩ outside n_max = {}",
                idx.n,
                idx.m,
                idx.spin.symbol(),
                self.n_max
            )));
        }
        Ok(self.flat_unchecked(idx.n, idx.m, idx.spin))
    }

    #[inline]
    pub(crate) fn flat_unchecked(&self, n: usize, m: usize, spin: Spin) -> usize {
        let l = self.levels();
        spin.offset() * l * l + n * l + m
    }

    pub fn index(&self, flat: usize) -> Result<BasisIndex> {
        if flat >= self.dim() {
            return Err(SimError::Range(format!(
                "flat index {flat} outside dimension {}",
                self.dim()
            )));
        }
        let l = self.levels();
        let block = l * l;
        let spin = if flat < block { Spin::Up } else { Spin::Down };
        let rem = flat % block;
        Ok(BasisIndex {
            n: rem / l,
            m: rem % l,
            spin,
        })
    }

    /// All basis labels in flat order.
    pub fn iter(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        (0..self.dim()).map(move |k| self.index(k).expect("in range"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub n: usize,
    pub m: usize,
    pub spin: Spin,
}

impl BasisIndex {
    pub fn new(n: usize, m: usize, spin: Spin) -> Self {
        BasisIndex { n, m, spin }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// σ_z eigenvalue.
    pub fn value(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub(crate) fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Up => '+',
            Spin::Down => '-',
        }
    }

    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Oscillator {
    /// y direction, operator a.
    A,
    /// z direction, operator b.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quadrature {
    Y,
    Z,
    Py,
    Pz,
}
