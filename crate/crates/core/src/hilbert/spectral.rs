use ndarray::{Array1, Array2};

use super::{HermitianOperator, StateVector};
use crate::linalg::hermitian_eigen;
use crate::{Result, SimError, C64};

/// Ascending eigenvalues with eigenvectors as matching columns.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Array2<C64>,
}

pub fn eigendecompose(h: &HermitianOperator) -> Result<EigenDecomposition> {
    let (eigenvalues, eigenvectors) = hermitian_eigen(h.matrix())?;
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// max_k ‖H v_k − λ_k v_k‖₂
    pub fn max_residual(&self, h: &HermitianOperator) -> f64 {
        let hv = h.matrix().dot(&self.eigenvectors);
        (0..self.dim())
            .map(|k| {
                hv.column(k)
                    .iter()
                    .zip(self.eigenvectors.column(k).iter())
                    .map(|(a, v)| (a - v * self.eigenvalues[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// max |(V†V − 1)_ij|
    pub fn orthonormality_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        let gram = v.t().mapv(|z| z.conj()).dot(v);
        gram.indexed_iter()
            .map(|((i, j), z)| {
                let want = if i == j { 1.0 } else { 0.0 };
                (z - C64::new(want, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// V Λ V†
    pub fn reconstruct(&self) -> Array2<C64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, mut col) in scaled.columns_mut().into_iter().enumerate() {
            col.mapv_inplace(|z| z * self.eigenvalues[k]);
        }
        scaled.dot(&v.t().mapv(|z| z.conj()))
    }

    /// Projects ψ(0) onto the eigenbasis once for repeated propagation.
    pub fn propagator(&self, psi0: &StateVector) -> Result<Propagator<'_>> {
        if psi0.dim() != self.dim() {
            return Err(SimError::shape(self.dim(), psi0.dim()));
        }
        let coeffs = self
            .eigenvectors
            .t()
            .mapv(|z| z.conj())
            .dot(psi0.amplitudes());
        Ok(Propagator {
            eig: self,
            psi0: psi0.clone(),
            coeffs,
        })
    }

    /// ψ(t) = V exp(−iΛt) V† ψ(0) for each t (in units of 1/ω).
    pub fn evolve(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        let prop = self.propagator(psi0)?;
        Ok(times.iter().map(|&t| prop.state_at(t)).collect())
    }
}

pub struct Propagator<'a> {
    eig: &'a EigenDecomposition,
    psi0: StateVector,
    coeffs: Array1<C64>,
}

impl Propagator<'_> {
    pub fn state_at(&self, t: f64) -> StateVector {
        if t == 0.0 {
            return self.psi0.clone();
        }
        let phased: Array1<C64> = self
            .coeffs
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(c, &e)| c * C64::from_polar(1.0, -e * t))
            .collect();
        StateVector::from_raw(self.eig.eigenvectors.dot(&phased))
    }
}
