use ndarray::Array1;

use super::{BasisSpec, HermitianOperator, Spin};
use crate::{Result, SimError, C64};

/// Tolerance on the imaginary part of an expectation value.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// Discarded coherent-state weight above which a warning is logged.
pub const TAIL_WARN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Array1<C64>,
}

impl StateVector {
    /// Normalizes the supplied amplitudes.
    pub fn from_amplitudes(amps: Array1<C64>) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SimError::Numeric("state has non-finite amplitudes".into()));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SimError::DegenerateInput("zero state vector".into()));
        }
        Ok(StateVector {
            amps: amps.mapv(|z| z / norm),
        })
    }

    /// Wraps amplitudes that are already normalized by construction.
    pub(crate) fn from_raw(amps: Array1<C64>) -> Self {
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(SimError::shape(self.dim(), other.dim()));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Superposition c₁|self⟩ + c₂|other⟩, renormalized.
    pub fn superpose(&self, c1: C64, other: &StateVector, c2: C64) -> Result<StateVector> {
        if self.dim() != other.dim() {
            return Err(SimError::shape(self.dim(), other.dim()));
        }
        StateVector::from_amplitudes(&self.amps * c1 + &other.amps * c2)
    }
}

pub fn fock_state(spec: BasisSpec, n: usize, m: usize, spin: Spin) -> Result<StateVector> {
    let idx = spec.flat(super::BasisIndex::new(n, m, spin))?;
    let mut amps = Array1::from_elem(spec.dim(), C64::new(0.0, 0.0));
    amps[idx] = C64::new(1.0, 0.0);
    Ok(StateVector { amps })
}

#[derive(Clone, Debug)]
pub struct CoherentState {
    pub state: StateVector,
    /// 1 − Σ|c|² of the truncated expansion before renormalization.
    pub discarded_weight: f64,
}

/// Product of coherent states |α⟩ ⊗ |β⟩ with spinor `spin_amps` = (c₊, c₋),
/// truncated to the basis and renormalized.
pub fn coherent_state(
    spec: BasisSpec,
    alpha: C64,
    beta: C64,
    spin_amps: (C64, C64),
) -> Result<CoherentState> {
    let spin_norm = (spin_amps.0.norm_sqr() + spin_amps.1.norm_sqr()).sqrt();
    if spin_norm == 0.0 || !spin_norm.is_finite() {
        return Err(SimError::DegenerateInput(
            "spin amplitudes must be a nonzero finite spinor".into(),
        ));
    }
    if !(alpha.norm().is_finite() && beta.norm().is_finite()) {
        return Err(SimError::Numeric("coherent amplitude is not finite".into()));
    }
    let chi = [spin_amps.0 / spin_norm, spin_amps.1 / spin_norm];

    // f_k = e^{-|z|²/2} z^k / √(k!)
    let series = |z: C64| {
        let mut f = Vec::with_capacity(spec.levels());
        let mut term = C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
        f.push(term);
        for k in 1..spec.levels() {
            term = term * z / (k as f64).sqrt();
            f.push(term);
        }
        f
    };
    let fa = series(alpha);
    let fb = series(beta);

    let mut amps = Array1::from_elem(spec.dim(), C64::new(0.0, 0.0));
    for (s, spin) in Spin::BOTH.into_iter().enumerate() {
        for (n, an) in fa.iter().enumerate() {
            for (m, bm) in fb.iter().enumerate() {
                amps[spec.flat_unchecked(n, m, spin)] = an * bm * chi[s];
            }
        }
    }
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let discarded_weight = (1.0 - kept).max(0.0);
    if discarded_weight > TAIL_WARN {
        log::warn!(
            "coherent state (|α|² = {:.3}, |β|² = {:.3}) loses weight {:.2e} to truncation at n_max = {}",
            alpha.norm_sqr(),
            beta.norm_sqr(),
            discarded_weight,
            spec.n_max
        );
    }
    Ok(CoherentState {
        state: StateVector::from_amplitudes(amps)?,
        discarded_weight,
    })
}

/// ⟨ψ|O|ψ⟩ for Hermitian O.
pub fn expectation(psi: &StateVector, op: &HermitianOperator) -> Result<f64> {
    if psi.dim() != op.dim() {
        return Err(SimError::shape(op.dim(), psi.dim()));
    }
    let m = op.matrix();
    let amps = psi.amplitudes();
    let mut acc = C64::new(0.0, 0.0);
    for (i, ci) in amps.iter().enumerate() {
        if *ci == C64::new(0.0, 0.0) {
            continue;
        }
        let row = m.row(i);
        let mut dot = C64::new(0.0, 0.0);
        for (mij, cj) in row.iter().zip(amps.iter()) {
            dot += mij * cj;
        }
        acc += ci.conj() * dot;
    }
    if acc.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(SimError::HermiticityViolation { imag: acc.im });
    }
    Ok(acc.re)
}
