//! First-order (in b₁) Heisenberg-picture predictions at b₀ = 0.
//!
//! With dy/dt = p_y + √2 b₁ σ_z, dp_y/dt = −y (and the z analogue with −σ_y),
//! freezing the spin at its initial expectation gives
//!
//! ```text
//! y(t)  = y₀ cos t + p_y0 sin t + √2 b₁ ⟨σ_z⟩₀ sin t
//! z(t)  = z₀ cos t + p_z0 sin t − √2 b₁ ⟨σ_y⟩₀ sin t
//! p_y(t) = p_y0 cos t − y₀ sin t + √2 b₁ ⟨σ_z⟩₀ (cos t − 1)
//! p_z(t) = p_z0 cos t − z₀ sin t − √2 b₁ ⟨σ_y⟩₀ (cos t − 1)
//! ```
//!
//! The p_z line uses p_z0 cos t so that b₁ = 0 reduces to free oscillation.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::dynamics::TimeSeries;
use crate::hilbert::{expectation, pauli, quadrature, BasisSpec, PauliAxis, Quadrature, StateVector};
use crate::{Result, SimError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct InitialConditions {
    pub y0: f64,
    pub z0: f64,
    pub py0: f64,
    pub pz0: f64,
    pub sy0: f64,
    pub sz0: f64,
}

impl InitialConditions {
    pub fn new(y0: f64, z0: f64, py0: f64, pz0: f64, sy0: f64, sz0: f64) -> Result<Self> {
        let ic = InitialConditions {
            y0,
            z0,
            py0,
            pz0,
            sy0,
            sz0,
        };
        let all = [y0, z0, py0, pz0, sy0, sz0];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Numeric("initial conditions must be finite".into()));
        }
        // small slack for expectations computed in floating point
        if sy0.abs() > 1.0 + 1e-12 || sz0.abs() > 1.0 + 1e-12 {
            return Err(SimError::Config(format!(
                "spin expectations must lie in [-1, 1], got sy0 = {sy0}, sz0 = {sz0}"
            )));
        }
        Ok(ic)
    }

    /// Expectations of y, z, p_y, p_z, σ_y, σ_z in `psi`.
    pub fn from_state(psi: &StateVector, basis: BasisSpec) -> Result<Self> {
        let q = |which| expectation(psi, &quadrature(basis, which));
        let s = |axis| expectation(psi, &pauli(basis, axis));
        Self::new(
            q(Quadrature::Y)?,
            q(Quadrature::Z)?,
            q(Quadrature::Py)?,
            q(Quadrature::Pz)?,
            s(PauliAxis::Y)?,
            s(PauliAxis::Z)?,
        )
    }
}

/// Columns y, z, py, pz of the first-order prediction on `times` (ωt).
pub fn perturbative_series(ic: &InitialConditions, b1: f64, times: &[f64]) -> TimeSeries {
    let k = SQRT_2 * b1;
    let mut y = Vec::with_capacity(times.len());
    let mut z = Vec::with_capacity(times.len());
    let mut py = Vec::with_capacity(times.len());
    let mut pz = Vec::with_capacity(times.len());
    for &t in times {
        let (s, c) = t.sin_cos();
        y.push(ic.y0 * c + ic.py0 * s + k * ic.sz0 * s);
        z.push(ic.z0 * c + ic.pz0 * s - k * ic.sy0 * s);
        py.push(ic.py0 * c - ic.y0 * s + k * ic.sz0 * (c - 1.0));
        pz.push(ic.pz0 * c - ic.z0 * s - k * ic.sy0 * (c - 1.0));
    }
    let mut series = TimeSeries::new(times.to_vec());
    for (name, col) in [("y", y), ("z", z), ("py", py), ("pz", pz)] {
        series.push_column(name, col).expect("lengths match");
    }
    series
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnError {
    pub name: String,
    pub max_abs_err: f64,
    pub rms_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub columns: Vec<ColumnError>,
}

impl CompareReport {
    pub fn column(&self, name: &str) -> Option<&ColumnError> {
        self.columns.iter().find(|c| c.name == name)
    }
}

/// Error norms of `exact` against `predicted` for every column of `predicted`.
pub fn compare(exact: &TimeSeries, predicted: &TimeSeries) -> Result<CompareReport> {
    if exact.len() != predicted.len() {
        return Err(SimError::shape(exact.len(), predicted.len()));
    }
    if let Some((a, b)) = exact
        .times
        .iter()
        .zip(&predicted.times)
        .find(|(a, b)| (*a - *b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(SimError::Config(format!("time grids differ ({a} vs {b})")));
    }
    let mut columns = Vec::new();
    for col in &predicted.columns {
        let ex = exact
            .column(&col.name)
            .ok_or_else(|| SimError::Config(format!("exact series has no column '{}'", col.name)))?;
        let mut max_abs_err = 0.0f64;
        let mut sq = 0.0;
        for (a, b) in ex.iter().zip(&col.values) {
            let d = (a - b).abs();
            max_abs_err = max_abs_err.max(d);
            sq += d * d;
        }
        let rms_err = if col.values.is_empty() {
            0.0
        } else {
            (sq / col.values.len() as f64).sqrt()
        };
        columns.push(ColumnError {
            name: col.name.clone(),
            max_abs_err,
            rms_err,
        });
    }
    Ok(CompareReport { columns })
}
