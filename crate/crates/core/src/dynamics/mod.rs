//! Zitterbewegung Hamiltonian, time evolution, spectra and densities.
//!
//! In units of ħω the Rashba-configured Hamiltonian reads
//!
//! ```text
//! H = a†a + b†b + i b₁ (−(a − a†) σ_z + (b − b†) σ_y) + b₀·σ
//!   = a†a + b†b + √2 b₁ (p_y σ_z − p_z σ_y) + b₀·σ
//! ```
//!
//! with the zero-point constant dropped, so the uncoupled spectrum starts at 0.
//! The general form driven by an arbitrary gradient is
//! `a†a + b†b − Σ_ij b_ij p_i σ_j + b₀·σ`; for the Rashba preset
//! (b_yz = −b_zy = β) it equals the form above with b₁ = −β/√2.

mod density;
mod spectrum;

pub use density::{hermite_functions, density, DensityGrid, GridSpec};
pub use spectrum::{convergence_report, spectra, spectrum_sweep, ConvergenceReport, SpectrumTable};

use std::f64::consts::SQRT_2;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::gauge::{GaugeCoupling, Mat3, Vec3};
use crate::hilbert::{
    eigendecompose, ladder_lower, pauli, quadrature, BasisSpec, EigenDecomposition,
    HermitianOperator, Oscillator, PauliAxis, Quadrature, StateVector,
};
use crate::{Execution, Result, SimError, C64};

/// Column names of an evolution run, in output order.
pub const OBSERVABLES: [&str; 9] = ["y", "z", "py", "pz", "sx", "sy", "sz", "H", "norm"];

/// Default sampling step and horizon, in units of 1/ω.
pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_T_MAX: f64 = 50.0;
/// Default truncation (dimension 242).
pub const DEFAULT_N_MAX: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CouplingMode {
    /// The displayed Rashba Hamiltonian parameterized by b₁.
    Rashba,
    /// −Σ_ij b_ij p̃_i σ_j for i ∈ {y, z}; the x row is not simulated.
    General { b_matrix: Mat3 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZbHamiltonianSpec {
    pub b1: f64,
    pub b0: Vec3,
    pub basis: BasisSpec,
    pub mode: CouplingMode,
}

impl ZbHamiltonianSpec {
    pub fn rashba(b1: f64, basis: BasisSpec) -> Self {
        ZbHamiltonianSpec {
            b1,
            b0: [0.0; 3],
            basis,
            mode: CouplingMode::Rashba,
        }
    }

    pub fn general(coupling: &GaugeCoupling, basis: BasisSpec) -> Self {
        ZbHamiltonianSpec {
            b1: coupling.b1(),
            b0: coupling.b0,
            basis,
            mode: CouplingMode::General {
                b_matrix: coupling.b_matrix,
            },
        }
    }

    pub fn with_b0(mut self, b0: Vec3) -> Self {
        self.b0 = b0;
        self
    }

    pub fn with_basis(mut self, basis: BasisSpec) -> Self {
        self.basis = basis;
        self
    }

    /// Same spec with the gradient coupling replaced by b₁ (Rashba mode) or
    /// the b-matrix rescaled so that its b₁ equals `b1` (general mode).
    pub fn with_b1(mut self, b1: f64) -> Self {
        if let CouplingMode::General { b_matrix } = self.mode {
            let s = if self.b1 != 0.0 { b1 / self.b1 } else { 0.0 };
            self.mode = CouplingMode::General {
                b_matrix: b_matrix.map(|r| r.map(|v| v * s)),
            };
        }
        self.b1 = b1;
        self
    }

    fn validate(&self) -> Result<()> {
        let finite = self.b1.is_finite()
            && self.b0.iter().all(|v| v.is_finite())
            && match &self.mode {
                CouplingMode::Rashba => true,
                CouplingMode::General { b_matrix } => b_matrix.iter().flatten().all(|v| v.is_finite()),
            };
        if finite {
            Ok(())
        } else {
            Err(SimError::Numeric("Hamiltonian parameters must be finite".into()))
        }
    }
}

/// Assemble H/ħω in the truncated basis.
pub fn build_hamiltonian(spec: &ZbHamiltonianSpec) -> Result<HermitianOperator> {
    spec.validate()?;
    let basis = spec.basis;
    let dim = basis.dim();
    let mut h = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
    for (k, idx) in basis.iter().enumerate() {
        h[[k, k]] = C64::new((idx.n + idx.m) as f64, 0.0);
    }

    let sx = pauli(basis, PauliAxis::X).into_matrix();
    let sy = pauli(basis, PauliAxis::Y).into_matrix();
    let sz = pauli(basis, PauliAxis::Z).into_matrix();

    match spec.mode {
        CouplingMode::Rashba => {
            if spec.b1 != 0.0 {
                let a = ladder_lower(basis, Oscillator::A);
                let b = ladder_lower(basis, Oscillator::B);
                let a_diff = &a - &a.t();
                let b_diff = &b - &b.t();
                let coupling = (b_diff.dot(&sy) - a_diff.dot(&sz)) * C64::new(0.0, spec.b1);
                h = h + coupling;
            }
        }
        CouplingMode::General { b_matrix } => {
            if b_matrix[0].iter().any(|v| *v != 0.0) {
                log::warn!(
                    "gradient couples p_x (row x = {:?}); the two-oscillator engine drops these terms",
                    b_matrix[0]
                );
            }
            let py = quadrature(basis, Quadrature::Py).into_matrix();
            let pz = quadrature(basis, Quadrature::Pz).into_matrix();
            for (row, p) in [(1, &py), (2, &pz)] {
                for (j, s) in [&sx, &sy, &sz].into_iter().enumerate() {
                    let c = b_matrix[row][j];
                    if c != 0.0 {
                        h = h - p.dot(s) * C64::new(c, 0.0);
                    }
                }
            }
        }
    }

    for (j, s) in [&sx, &sy, &sz].into_iter().enumerate() {
        if spec.b0[j] != 0.0 {
            h = h + s * C64::new(spec.b0[j], 0.0);
        }
    }
    HermitianOperator::from_matrix(h)
}

/// Nonzero entries of a Hermitian operator, row-major.
#[derive(Clone, Debug)]
struct SparseObservable {
    entries: Vec<(usize, usize, C64)>,
}

impl SparseObservable {
    fn from_operator(op: &HermitianOperator) -> Self {
        let entries = op
            .matrix()
            .indexed_iter()
            .filter(|(_, z)| **z != C64::new(0.0, 0.0))
            .map(|((i, j), z)| (i, j, *z))
            .collect();
        SparseObservable { entries }
    }

    fn expectation(&self, psi: &StateVector) -> Result<f64> {
        let amps = psi.amplitudes();
        let mut acc = C64::new(0.0, 0.0);
        for &(i, j, v) in &self.entries {
            acc += amps[i].conj() * v * amps[j];
        }
        if acc.im.abs() > crate::hilbert::EXPECTATION_IMAG_TOL {
            return Err(SimError::HermiticityViolation { imag: acc.im });
        }
        Ok(acc.re)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Observables sampled on a common time grid (ωt).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub columns: Vec<Column>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>) -> Self {
        TimeSeries {
            times,
            columns: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.times.len() {
            return Err(SimError::shape(self.times.len(), values.len()));
        }
        self.columns.push(Column {
            name: name.into(),
            values,
        });
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    /// max |column| over all samples.
    pub fn max_abs(&self, name: &str) -> Option<f64> {
        self.column(name)
            .map(|v| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())))
    }
}

/// Sample times 0, dt, 2dt, … ≤ t_max.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SimError::Config(format!("dt must be positive, got {dt}")));
    }
    if !(t_max.is_finite() && t_max >= dt) {
        return Err(SimError::Config(format!("t_max must be at least dt, got {t_max}")));
    }
    let steps = (t_max / dt * (1.0 + 1e-12)).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// A diagonalized Hamiltonian together with the observables recorded during
/// evolution. Diagonalization happens once; runs only apply phases.
pub struct Experiment {
    spec: ZbHamiltonianSpec,
    hamiltonian: HermitianOperator,
    eig: EigenDecomposition,
    observables: Vec<SparseObservable>,
}

impl Experiment {
    pub fn new(spec: ZbHamiltonianSpec) -> Result<Self> {
        let hamiltonian = build_hamiltonian(&spec)?;
        let eig = eigendecompose(&hamiltonian)?;
        let basis = spec.basis;
        let ops = [
            quadrature(basis, Quadrature::Y),
            quadrature(basis, Quadrature::Z),
            quadrature(basis, Quadrature::Py),
            quadrature(basis, Quadrature::Pz),
            pauli(basis, PauliAxis::X),
            pauli(basis, PauliAxis::Y),
            pauli(basis, PauliAxis::Z),
            hamiltonian.clone(),
        ];
        let observables = ops.iter().map(SparseObservable::from_operator).collect();
        Ok(Experiment {
            spec,
            hamiltonian,
            eig,
            observables,
        })
    }

    pub fn spec(&self) -> &ZbHamiltonianSpec {
        &self.spec
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn state_at(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        Ok(self.eig.propagator(psi0)?.state_at(t))
    }

    /// Records every observable of [`OBSERVABLES`] at the given times.
    pub fn run_at(&self, psi0: &StateVector, times: &[f64], exec: Execution) -> Result<TimeSeries> {
        let prop = self.eig.propagator(psi0)?;
        let rows: Vec<Result<[f64; 9]>> = exec.map(times, |&t| {
            let psi = prop.state_at(t);
            let mut row = [0.0; 9];
            for (slot, obs) in row.iter_mut().zip(&self.observables) {
                *slot = obs.expectation(&psi)?;
            }
            row[8] = psi.norm();
            Ok(row)
        });
        let mut cols = vec![Vec::with_capacity(times.len()); OBSERVABLES.len()];
        for row in rows {
            let row = row?;
            for (c, v) in cols.iter_mut().zip(row) {
                c.push(v);
            }
        }
        let mut series = TimeSeries::new(times.to_vec());
        for (name, values) in OBSERVABLES.iter().zip(cols) {
            series.push_column(*name, values)?;
        }
        Ok(series)
    }

    pub fn run(&self, psi0: &StateVector, t_max: f64, dt: f64, exec: Execution) -> Result<TimeSeries> {
        self.run_at(psi0, &time_grid(t_max, dt)?, exec)
    }
}

/// Propagate `psi0` under the Hamiltonian of `spec`, sampling every `dt` up to `t_max`.
pub fn run_evolution(
    spec: &ZbHamiltonianSpec,
    psi0: &StateVector,
    t_max: f64,
    dt: f64,
    exec: Execution,
) -> Result<TimeSeries> {
    if psi0.dim() != spec.basis.dim() {
        return Err(SimError::shape(spec.basis.dim(), psi0.dim()));
    }
    Experiment::new(*spec)?.run(psi0, t_max, dt, exec)
}

/// cos θ |0 0 +⟩ + e^{iφ} sin θ |0 0 −⟩.
pub fn spin_superposition(basis: BasisSpec, theta: f64, phase: f64) -> Result<StateVector> {
    use crate::hilbert::{fock_state, Spin};
    let up = fock_state(basis, 0, 0, Spin::Up)?;
    let down = fock_state(basis, 0, 0, Spin::Down)?;
    up.superpose(
        C64::new(theta.cos(), 0.0),
        &down,
        C64::from_polar(theta.sin(), phase),
    )
}

/// √2 b₁, the first-order Zitterbewegung amplitude of ⟨y⟩ for |0 0 ±⟩.
pub fn zb_amplitude(b1: f64) -> f64 {
    SQRT_2 * b1.abs()
}
