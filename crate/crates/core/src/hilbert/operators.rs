use std::f64::consts::FRAC_1_SQRT_2;

use ndarray::{Array1, Array2};

use super::{BasisSpec, Oscillator, PauliAxis, Quadrature, Spin};
use crate::{Result, SimError, C64};

pub type ComplexMatrix = Array2<C64>;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Dense Hermitian matrix in the truncated basis. Construction stores the
/// exact Hermitian part (M + M†)/2 of whatever matrix is supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c {
            return Err(SimError::shape(r, c));
        }
        let adj = matrix.t().mapv(|z| z.conj());
        let matrix = (&matrix + &adj) * C64::new(0.5, 0.0);
        Ok(HermitianOperator { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[[i, j]]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.matrix.dot(v)
    }
}

/// Lowering operator a (lowers n) or b (lowers m), truncated to the basis.
pub fn ladder_lower(spec: BasisSpec, which: Oscillator) -> ComplexMatrix {
    let dim = spec.dim();
    let mut out = Array2::from_elem((dim, dim), ZERO);
    for spin in Spin::BOTH {
        for n in 0..=spec.n_max {
            for m in 0..=spec.n_max {
                let from = spec.flat_unchecked(n, m, spin);
                let (to, k) = match which {
                    Oscillator::A if n > 0 => (spec.flat_unchecked(n - 1, m, spin), n),
                    Oscillator::B if m > 0 => (spec.flat_unchecked(n, m - 1, spin), m),
                    _ => continue,
                };
                out[[to, from]] = C64::new((k as f64).sqrt(), 0.0);
            }
        }
    }
    out
}

/// 1 ⊗ 1 ⊗ σ_axis, in the σ_z eigenbasis with s = +1 first.
pub fn pauli(spec: BasisSpec, axis: PauliAxis) -> HermitianOperator {
    let sigma: [[C64; 2]; 2] = match axis {
        PauliAxis::X => [[ZERO, C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), ZERO]],
        PauliAxis::Y => [[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]],
        PauliAxis::Z => [[C64::new(1.0, 0.0), ZERO], [ZERO, C64::new(-1.0, 0.0)]],
    };
    let dim = spec.dim();
    let mut out = Array2::from_elem((dim, dim), ZERO);
    for n in 0..=spec.n_max {
        for m in 0..=spec.n_max {
            for (i, si) in Spin::BOTH.into_iter().enumerate() {
                for (j, sj) in Spin::BOTH.into_iter().enumerate() {
                    let val = sigma[i][j];
                    if val != ZERO {
                        out[[spec.flat_unchecked(n, m, si), spec.flat_unchecked(n, m, sj)]] = val;
                    }
                }
            }
        }
    }
    HermitianOperator { matrix: out }
}

/// Dimensionless position or momentum of either oscillator:
/// y = (a + a†)/√2, p_y = i(a† − a)/√2 and likewise for z with b.
pub fn quadrature(spec: BasisSpec, which: Quadrature) -> HermitianOperator {
    let osc = match which {
        Quadrature::Y | Quadrature::Py => Oscillator::A,
        Quadrature::Z | Quadrature::Pz => Oscillator::B,
    };
    let lower = ladder_lower(spec, osc);
    let raise = lower.t().to_owned();
    let matrix = match which {
        Quadrature::Y | Quadrature::Z => (&lower + &raise) * C64::new(FRAC_1_SQRT_2, 0.0),
        Quadrature::Py | Quadrature::Pz => (&raise - &lower) * C64::new(0.0, FRAC_1_SQRT_2),
    };
    HermitianOperator { matrix }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{fock_state, BasisIndex};

    fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        a.dot(b) - b.dot(a)
    }

    fn identity(dim: usize) -> ComplexMatrix {
        Array2::from_shape_fn((dim, dim), |(i, j)| if i == j { C64::new(1.0, 0.0) } else { ZERO })
    }

    #[test]
    fn lowering_at_n_max_one() {
        let spec = BasisSpec::new(1);
        let a = ladder_lower(spec, Oscillator::A);
        let nonzero: Vec<_> = a
            .indexed_iter()
            .filter(|(_, z)| **z != ZERO)
            .map(|((i, j), z)| (spec.index(i).unwrap(), spec.index(j).unwrap(), *z))
            .collect();
        // n=1 -> n=0 for m ∈ {0,1} and both spins
        assert_eq!(nonzero.len(), 4);
        for (to, from, z) in nonzero {
            assert_eq!((to.n, from.n), (0, 1));
            assert_eq!((to.m, to.spin), (from.m, from.spin));
            assert_eq!(z, C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn lowering_acts_on_fock_state() {
        let spec = BasisSpec::new(4);
        let a = ladder_lower(spec, Oscillator::A);
        let psi = fock_state(spec, 2, 0, Spin::Up).unwrap();
        let out = a.dot(psi.amplitudes());
        let target = spec.flat(BasisIndex::new(1, 0, Spin::Up)).unwrap();
        for (k, z) in out.iter().enumerate() {
            let want = if k == target { 2f64.sqrt() } else { 0.0 };
            assert!((z - C64::new(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn canonical_commutator_confined_to_top_level() {
        let spec = BasisSpec::new(6);
        for osc in [Oscillator::A, Oscillator::B] {
            let a = ladder_lower(spec, osc);
            let adag = a.t().to_owned();
            let dev = commutator(&a, &adag) - identity(spec.dim());
            for ((i, j), z) in dev.indexed_iter() {
                let (bi, bj) = (spec.index(i).unwrap(), spec.index(j).unwrap());
                let level = |b: BasisIndex| if osc == Oscillator::A { b.n } else { b.m };
                if level(bi) < spec.n_max && level(bj) < spec.n_max {
                    // √n·√n reproduces n up to one rounding
                    assert!(z.norm() <= 1e-14, "({i},{j}) {z}");
                } else if i == j {
                    // [a, a†] - 1 = -(n_max + 1) on the edge row
                    assert!((z - C64::new(-(spec.n_max as f64 + 1.0), 0.0)).norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn pauli_products() {
        for n_max in [0, 2, 3] {
            let spec = BasisSpec::new(n_max);
            let sx = pauli(spec, PauliAxis::X).into_matrix();
            let sy = pauli(spec, PauliAxis::Y).into_matrix();
            let sz = pauli(spec, PauliAxis::Z).into_matrix();
            let i = C64::new(0.0, 1.0);
            assert_eq!(sy.dot(&sz), &sx * i);
            assert_eq!(commutator(&sy, &sz), &sx * (i * 2.0));
            assert_eq!(sz.dot(&sz), identity(spec.dim()));
        }
    }

    #[test]
    fn sigma_z_eigenbasis() {
        let spec = BasisSpec::new(2);
        let sz = pauli(spec, PauliAxis::Z);
        let psi = fock_state(spec, 0, 0, Spin::Up).unwrap();
        assert_eq!(sz.apply(psi.amplitudes()), psi.amplitudes().clone());
    }

    #[test]
    fn position_momentum_commutator_interior() {
        let spec = BasisSpec::new(8);
        for (x, p, osc_level) in [
            (Quadrature::Y, Quadrature::Py, 0usize),
            (Quadrature::Z, Quadrature::Pz, 1usize),
        ] {
            let xm = quadrature(spec, x).into_matrix();
            let pm = quadrature(spec, p).into_matrix();
            let comm = commutator(&xm, &pm);
            for ((r, c), z) in comm.indexed_iter() {
                let (br, bc) = (spec.index(r).unwrap(), spec.index(c).unwrap());
                let lv = |b: BasisIndex| if osc_level == 0 { b.n } else { b.m };
                if lv(br) < spec.n_max && lv(bc) < spec.n_max {
                    let want = if r == c { C64::new(0.0, 1.0) } else { ZERO };
                    assert!((z - want).norm() < 1e-14, "({r},{c}) {z}");
                }
            }
        }
    }

    #[test]
    fn quadratures_are_hermitian() {
        let spec = BasisSpec::new(3);
        for q in [Quadrature::Y, Quadrature::Z, Quadrature::Py, Quadrature::Pz] {
            let m = quadrature(spec, q).into_matrix();
            let adj = m.t().mapv(|z| z.conj());
            assert_eq!(m, adj);
        }
    }

    #[test]
    fn from_matrix_symmetrizes() {
        let mut m = Array2::from_elem((2, 2), ZERO);
        m[[0, 1]] = C64::new(1.0, 1.0);
        let h = HermitianOperator::from_matrix(m).unwrap();
        assert_eq!(h.entry(0, 1), C64::new(0.5, 0.5));
        assert_eq!(h.entry(1, 0), C64::new(0.5, -0.5));
        assert!(HermitianOperator::from_matrix(Array2::from_elem((2, 3), ZERO)).is_err());
    }
}
