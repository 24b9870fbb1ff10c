use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::hilbert::{BasisSpec, Spin, StateVector};
use crate::{Execution, Result, SimError, C64};

/// Uniform axis min, min + step, … ≤ max (in x₀ units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let g = GridSpec { min, max, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(SimError::Config("grid bounds must be finite".into()));
        }
        if self.step <= 0.0 || self.max <= self.min {
            return Err(SimError::Config(format!(
                "grid needs step > 0 and max > min, got {}..{} step {}",
                self.min, self.max, self.step
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step * (1.0 + 1e-12)).floor() as usize;
        (0..=n).map(|k| self.min + k as f64 * self.step).collect()
    }
}

/// Normalized oscillator eigenfunctions ψ_0(ξ) … ψ_{count−1}(ξ), via the
/// three-term recurrence
/// ψ_{k+1} = √(2/(k+1)) ξ ψ_k − √(k/(k+1)) ψ_{k−1}.
pub fn hermite_functions(xi: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-0.5 * xi * xi).exp());
    if count > 1 {
        out.push(2f64.sqrt() * xi * out[0]);
    }
    for k in 1..count.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// p(y, z) sampled on a rectangular grid; `values[i][j]` is at (y_i, z_j).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub y_axis: Vec<f64>,
    pub z_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl DensityGrid {
    fn cell(&self) -> f64 {
        let dy = self.y_axis.get(1).map_or(1.0, |y1| y1 - self.y_axis[0]);
        let dz = self.z_axis.get(1).map_or(1.0, |z1| z1 - self.z_axis[0]);
        dy * dz
    }

    fn weighted_sum(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (row, y) in self.values.iter().zip(&self.y_axis) {
            for (p, z) in row.iter().zip(&self.z_axis) {
                acc += p * f(*y, *z);
            }
        }
        acc * self.cell()
    }

    /// Riemann sum Σ p Δy Δz.
    pub fn normalization(&self) -> f64 {
        self.weighted_sum(|_, _| 1.0)
    }

    /// (⟨y⟩, ⟨z⟩) of the sampled distribution.
    pub fn mean(&self) -> (f64, f64) {
        let n = self.normalization();
        (self.weighted_sum(|y, _| y) / n, self.weighted_sum(|_, z| z) / n)
    }

    /// Var(y) + Var(z) of the sampled distribution.
    pub fn variance(&self) -> f64 {
        let n = self.normalization();
        let (my, mz) = self.mean();
        self.weighted_sum(|y, z| (y - my).powi(2) + (z - mz).powi(2)) / n
    }

    /// Grid point of maximal density: (y, z, p).
    pub fn peak(&self) -> (f64, f64, f64) {
        let mut best = (self.y_axis[0], self.z_axis[0], f64::NEG_INFINITY);
        for (row, y) in self.values.iter().zip(&self.y_axis) {
            for (p, z) in row.iter().zip(&self.z_axis) {
                if *p > best.2 {
                    best = (*y, *z, *p);
                }
            }
        }
        best
    }
}

/// p(y,z) = Σ_s |Σ_{n,m} c_{nms} ψ_n(y) ψ_m(z)|² on the square grid `grid × grid`.
pub fn density(psi: &StateVector, basis: BasisSpec, grid: GridSpec, exec: Execution) -> Result<DensityGrid> {
    grid.validate()?;
    if psi.dim() != basis.dim() {
        return Err(SimError::shape(basis.dim(), psi.dim()));
    }
    let levels = basis.levels();
    let axis = grid.points();
    let table: Vec<Vec<f64>> = axis.iter().map(|&x| hermite_functions(x, levels)).collect();
    let amps = psi.amplitudes();

    let values = exec.map_range(axis.len(), |i| {
        let hy = &table[i];
        // partial[s][m] = Σ_n c_{nms} ψ_n(y_i)
        let partial: Vec<Vec<C64>> = Spin::BOTH
            .iter()
            .map(|&spin| {
                (0..levels)
                    .map(|m| {
                        (0..levels)
                            .map(|n| amps[basis.flat_unchecked(n, m, spin)] * hy[n])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        table
            .iter()
            .map(|hz| {
                partial
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(hz)
                            .map(|(c, h)| c * h)
                            .sum::<C64>()
                            .norm_sqr()
                    })
                    .sum()
            })
            .collect()
    });

    Ok(DensityGrid {
        y_axis: axis.clone(),
        z_axis: axis,
        values,
    })
}
