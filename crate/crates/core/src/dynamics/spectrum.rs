use serde::Serialize;

use super::{build_hamiltonian, ZbHamiltonianSpec};
use crate::gauge::Vec3;
use crate::hilbert::BasisSpec;
use crate::linalg::hermitian_eigenvalues;
use crate::{Execution, Result, SimError};

/// k lowest eigenvalues (units of ħω) for each b₁ of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub b1: Vec<f64>,
    /// energies[row][level], ascending within a row.
    pub energies: Vec<Vec<f64>>,
}

impl SpectrumTable {
    pub fn k(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }
}

/// Lowest `k` eigenvalues of each Hamiltonian, one cell per spec.
pub fn spectra(specs: &[ZbHamiltonianSpec], k: usize, exec: Execution) -> Result<Vec<Vec<f64>>> {
    for spec in specs {
        if k > spec.basis.dim() {
            return Err(SimError::Range(format!(
                "requested {k} eigenvalues but the basis has dimension {}",
                spec.basis.dim()
            )));
        }
    }
    exec.map(specs, |spec| {
        let h = build_hamiltonian(spec)?;
        let mut vals = hermitian_eigenvalues(h.matrix())?;
        vals.truncate(k);
        Ok(vals)
    })
    .into_iter()
    .collect()
}

pub fn spectrum_sweep(
    b1_values: &[f64],
    b0: Vec3,
    basis: BasisSpec,
    k: usize,
    exec: Execution,
) -> Result<SpectrumTable> {
    let specs: Vec<_> = b1_values
        .iter()
        .map(|&b1| ZbHamiltonianSpec::rashba(b1, basis).with_b0(b0))
        .collect();
    Ok(SpectrumTable {
        b1: b1_values.to_vec(),
        energies: spectra(&specs, k, exec)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub n_max: Vec<usize>,
    /// eigenvalues[row][level] for each truncation.
    pub eigenvalues: Vec<Vec<f64>>,
    /// |E − E_ref| / |E_ref| against the largest truncation (absolute
    /// difference where |E_ref| < 1e-12).
    pub relative_deviation: Vec<Vec<f64>>,
    pub reference_n_max: usize,
}

impl ConvergenceReport {
    pub fn max_deviation(&self, n_max: usize) -> Option<f64> {
        let row = self.n_max.iter().position(|&n| n == n_max)?;
        Some(self.relative_deviation[row].iter().fold(0.0, |a: f64, v| a.max(*v)))
    }
}

/// Lowest `k` eigenvalues of `spec` at each truncation, compared with the largest.
pub fn convergence_report(
    spec: &ZbHamiltonianSpec,
    k: usize,
    n_max_list: &[usize],
    exec: Execution,
) -> Result<ConvergenceReport> {
    if n_max_list.is_empty() {
        return Err(SimError::Config("empty truncation list".into()));
    }
    if let Some(bad) = n_max_list.iter().find(|&&n| n < 1) {
        return Err(SimError::Config(format!("n_max must be at least 1, got {bad}")));
    }
    let specs: Vec<_> = n_max_list
        .iter()
        .map(|&n| spec.with_basis(BasisSpec::new(n)))
        .collect();
    let eigenvalues = spectra(&specs, k, exec)?;
    let ref_row = n_max_list
        .iter()
        .enumerate()
        .max_by_key(|(i, n)| (**n, usize::MAX - i))
        .map(|(i, _)| i)
        .expect("nonempty");
    let reference = &eigenvalues[ref_row];
    let relative_deviation = eigenvalues
        .iter()
        .map(|row| {
            row.iter()
                .zip(reference)
                .map(|(e, r)| {
                    let d = (e - r).abs();
                    if r.abs() < 1e-12 {
                        d
                    } else {
                        d / r.abs()
                    }
                })
                .collect()
        })
        .collect();
    Ok(ConvergenceReport {
        n_max: n_max_list.to_vec(),
        eigenvalues,
        relative_deviation,
        reference_n_max: n_max_list[ref_row],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_larger_than_dimension_is_rejected() {
        let r = spectrum_sweep(&[0.0], [0.0; 3], BasisSpec::new(1), 9, Execution::Sequential);
        assert!(matches!(r, Err(SimError::Range(_))));
    }

    #[test]
    fn uncoupled_multiplicities() {
        let table = spectrum_sweep(&[0.0], [0.0; 3], BasisSpec::new(6), 30, Execution::Sequential).unwrap();
        let row = &table.energies[0];
        let mut at = 0;
        for level in 0..4 {
            let mult = 2 * (level + 1);
            assert!(row[at..at + mult].iter().all(|&e| e == level as f64));
            at += mult;
        }
    }

    #[test]
    fn uncoupled_levels_have_zero_deviation() {
        let spec = ZbHamiltonianSpec::rashba(0.0, BasisSpec::new(4));
        let rep = convergence_report(&spec, 12, &[3, 4, 6], Execution::Sequential).unwrap();
        assert_eq!(rep.reference_n_max, 6);
        // levels with N = n + m < 3 are exact at every truncation
        for row in &rep.relative_deviation {
            assert!(row.iter().all(|&d| d == 0.0));
        }
        assert!(convergence_report(&spec, 4, &[0, 3], Execution::Sequential).is_err());
        assert!(convergence_report(&spec, 4, &[], Execution::Sequential).is_err());
    }

    #[test]
    fn ground_state_deviation_shrinks_with_truncation() {
        let spec = ZbHamiltonianSpec::rashba(0.5, BasisSpec::new(4));
        let list = [4, 6, 8, 10, 12];
        let rep = convergence_report(&spec, 1, &list, Execution::default()).unwrap();
        let devs: Vec<f64> = rep.relative_deviation[..4].iter().map(|r| r[0]).collect();
        assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    }
}
