//! Dense Hermitian eigensolver.
//!
//! Cyclic complex Jacobi rotations on a row-major copy of the matrix, followed
//! by a canonical choice of eigenvectors inside every numerically degenerate
//! cluster, so that identical inputs always yield identical eigenvector
//! matrices regardless of how the rotations happened to mix the cluster.

use ndarray::Array2;

use crate::{Result, SimError, C64};

const MAX_SWEEPS: usize = 80;

/// Relative gap below which adjacent eigenvalues are treated as one cluster.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns.
pub fn hermitian_eigen(matrix: &Array2<C64>) -> Result<(Vec<f64>, Array2<C64>)> {
    let (values, vectors) = solve(matrix, true)?;
    Ok((values, vectors.expect("vectors requested")))
}

/// Ascending eigenvalues only; skips eigenvector accumulation.
pub fn hermitian_eigenvalues(matrix: &Array2<C64>) -> Result<Vec<f64>> {
    Ok(solve(matrix, false)?.0)
}

fn solve(matrix: &Array2<C64>, want_vectors: bool) -> Result<(Vec<f64>, Option<Array2<C64>>)> {
    let (rows, cols) = matrix.dim();
    if rows != cols {
        return Err(SimError::shape(rows, cols));
    }
    let n = rows;
    if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SimError::Numeric("matrix has non-finite entries".into()));
    }

    // Work on the exactly Hermitian part.
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (matrix[[i, j]] + matrix[[j, i]].conj()) * 0.5;
        }
    }
    let mut v = if want_vectors {
        let mut v = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = C64::new(1.0, 0.0);
        }
        v
    } else {
        Vec::new()
    };

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale > 0.0 {
        jacobi_sweeps(&mut a, &mut v, n, scale)?;
    }

    let raw: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]).then(i.cmp(&j)));

    let values: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
    if !want_vectors {
        return Ok((values, None));
    }
    let mut vectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = v[row * n + k];
        }
    }

    let norm = values
        .first()
        .map(|lo| lo.abs().max(values[n - 1].abs()))
        .unwrap_or(0.0);
    let tol = DEGENERACY_TOL * norm;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        canonicalize_cluster(&mut vectors, start, end);
        start = end;
    }

    Ok((values, Some(vectors)))
}

fn jacobi_sweeps(a: &mut [C64], v: &mut [C64], n: usize, scale: f64) -> Result<()> {
    let negligible = 1e-300_f64.max(1e-22 * scale);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale * 1e-2 {
            return Ok(());
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let b = a[p * n + q];
                let r = b.norm();
                if r <= negligible {
                    continue;
                }
                rotate(a, v, n, p, q, b, r);
                rotated = true;
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    let off: f64 = (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .map(|(p, q)| a[p * n + q].norm_sqr())
        .sum::<f64>()
        .sqrt();
    // Converged to rounding level even if the strict threshold was missed.
    if off <= 1e-13 * scale {
        Ok(())
    } else {
        Err(SimError::Numeric(format!(
            "Jacobi iteration did not converge (off-diagonal norm {off:e})"
        )))
    }
}

/// Zero `a[p][q]` with the unitary U = [[c, s], [-s ū, c ū]] where u = b/|b|.
fn rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize, b: C64, r: f64) {
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let u = b / r;
    let ubar = u.conj();

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let nkp = akp * c - ubar * akq * s;
        let nkq = akp * s + ubar * akq * c;
        a[k * n + p] = nkp;
        a[p * n + k] = nkp.conj();
        a[k * n + q] = nkq;
        a[q * n + k] = nkq.conj();
    }
    a[p * n + p] = C64::new(app - t * r, 0.0);
    a[q * n + q] = C64::new(aqq + t * r, 0.0);
    a[p * n + q] = C64::new(0.0, 0.0);
    a[q * n + p] = C64::new(0.0, 0.0);

    if v.is_empty() {
        return;
    }
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c - ubar * vkq * s;
        v[k * n + q] = vkp * s + ubar * vkq * c;
    }
}

/// Replace columns `start..end` by a basis of the same subspace built with
/// pivoted Gram–Schmidt on the projected unit vectors P e_j: at each step the
/// basis vector with the largest remaining projection (lowest index on ties)
/// is taken, and the result is phased so that its pivot entry is real and
/// positive. The outcome depends only on the subspace, not on the input basis.
fn canonicalize_cluster(vectors: &mut Array2<C64>, start: usize, end: usize) {
    let dim = vectors.nrows();
    let k = end - start;
    let mut resid: Vec<f64> = (0..dim)
        .map(|j| (start..end).map(|c| vectors[[j, c]].norm_sqr()).sum())
        .collect();
    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(k);

    for _ in 0..k {
        let mut pivot = 0;
        for j in 1..dim {
            if resid[j] > resid[pivot] {
                pivot = j;
            }
        }

        let mut w = vec![C64::new(0.0, 0.0); dim];
        for c in start..end {
            let coeff = vectors[[pivot, c]].conj();
            for (row, wr) in w.iter_mut().enumerate() {
                *wr += vectors[[row, c]] * coeff;
            }
        }
        // Two passes of classical Gram–Schmidt against the vectors already chosen.
        for _ in 0..2 {
            for prev in &chosen {
                let overlap: C64 = prev.iter().zip(&w).map(|(p, x)| p.conj() * x).sum();
                for (wr, p) in w.iter_mut().zip(prev) {
                    *wr -= p * overlap;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let phase = if w[pivot].norm() > 0.0 {
            w[pivot].conj() / w[pivot].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for wr in w.iter_mut() {
            *wr = *wr * phase / norm;
        }
        for (r, wr) in resid.iter_mut().zip(&w) {
            *r -= wr.norm_sqr();
        }
        resid[pivot] = f64::NEG_INFINITY;
        chosen.push(w);
    }

    for (offset, w) in chosen.into_iter().enumerate() {
        for (row, val) in w.into_iter().enumerate() {
            vectors[[row, start + offset]] = val;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input_sorts_with_permutation_vectors() {
        let mut m = Array2::zeros((3, 3));
        m[[0, 0]] = c(3.0, 0.0);
        m[[1, 1]] = c(1.0, 0.0);
        m[[2, 2]] = c(2.0, 0.0);
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        assert_eq!(vecs[[1, 0]], c(1.0, 0.0));
        assert_eq!(vecs[[2, 1]], c(1.0, 0.0));
        assert_eq!(vecs[[0, 2]], c(1.0, 0.0));
    }

    #[test]
    fn pauli_y_spectrum() {
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = c(0.0, -1.0);
        m[[1, 0]] = c(0.0, 1.0);
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-15);
        assert!((vals[1] - 1.0).abs() < 1e-15);
        // (1, -i)/√2 for -1 with pivot phase on the first entry
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((vecs[[0, 0]] - c(s, 0.0)).norm() < 1e-15);
        assert!((vecs[[1, 0]] - c(0.0, -s)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = Array2::zeros((2, 2));
        m[[0, 0]] = c(f64::NAN, 0.0);
        assert!(matches!(hermitian_eigen(&m), Err(SimError::Numeric(_))));
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let m = Array2::<C64>::zeros((4, 4));
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert!(vals.iter().all(|&x| x == 0.0));
        for i in 0..4 {
            assert_eq!(vecs[[i, i]], c(1.0, 0.0));
        }
    }

    #[test]
    fn degenerate_cluster_is_basis_independent() {
        // Same 2-dim degenerate subspace presented through two different unitaries.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m1 = Array2::zeros((3, 3));
        m1[[0, 0]] = c(1.0, 0.0);
        m1[[1, 1]] = c(1.0, 0.0);
        m1[[2, 2]] = c(5.0, 0.0);
        // Rotate by a unitary mixing all three coordinates.
        let mut u = Array2::zeros((3, 3));
        u[[0, 0]] = c(s, 0.0);
        u[[0, 1]] = c(0.0, s);
        u[[1, 0]] = c(0.0, s);
        u[[1, 1]] = c(s, 0.0);
        u[[2, 2]] = c(0.0, 1.0);
        let udag = u.t().mapv(|z: C64| z.conj());
        let m2 = u.dot(&m1).dot(&udag);
        let (_, v1) = hermitian_eigen(&m1).unwrap();
        let (_, v2) = hermitian_eigen(&m2).unwrap();
        // m1 and m2 have the same degenerate subspace span{e0, e1}.
        for i in 0..3 {
            for j in 0..2 {
                assert!((v1[[i, j]] - v2[[i, j]]).norm() < 1e-14, "{i} {j}");
            }
        }
    }
}
