//! Small dense real-symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Every matrix this crate needs to diagonalize is real symmetric: compact
//! partial transposes, Hankel blocks, and (in the oracle) dense 2^n operators
//! built from σ_z and σ_x only. Large sparse inputs are first split into
//! connected components so that the Jacobi sweeps only ever see the blocks.

use crate::error::{Error, Result};

/// Asymmetry above this is rejected by [`is_psd`] and friends.
pub const SYMMETRY_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Row-major square real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(SymMatrix { dim, data })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        SymMatrix { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] += v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest |a_ij - a_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn check_symmetric(&self) -> Result<()> {
        let a = self.asymmetry();
        if a > SYMMETRY_TOL {
            Err(Error::NotSymmetric(a))
        } else {
            Ok(())
        }
    }

    /// Entrywise maximum absolute difference.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Principal submatrix on `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> SymMatrix {
        SymMatrix::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Index sets of the connected components of the nonzero pattern.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.dim;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.get(i, j) != 0.0 || self.get(j, i) != 0.0 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(i);
        }
        groups
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending.
///
/// Sweeps stop once the off-diagonal norm drops below `1e-12` times the
/// Frobenius norm of the input.
pub fn jacobi_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    m.check_symmetric()?;
    let n = m.dim();
    let mut a = m.clone();
    // symmetrize exactly so rotations see a consistent matrix
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let target = 1e-12 * a.frobenius();
    let mut sweeps = 0;
    loop {
        let off: f64 = {
            let mut s = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    s += 2.0 * a.get(i, j) * a.get(i, j);
                }
            }
            s.sqrt()
        };
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Like [`jacobi_eigenvalues`] but diagonalizes each connected component of
/// the sparsity pattern separately. Identical spectrum, far cheaper on the
/// block-structured 2^n matrices of the oracle.
pub fn block_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    m.check_symmetric()?;
    let mut ev = Vec::with_capacity(m.dim());
    for comp in m.components() {
        if comp.len() == 1 {
            ev.push(m.get(comp[0], comp[0]));
        } else {
            ev.extend(jacobi_eigenvalues(&m.submatrix(&comp))?);
        }
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Positivity threshold used throughout: the smallest eigenvalue may dip to
/// `-tol * max(1, largest |eigenvalue|)`.
pub fn psd_from_spectrum(ev: &[f64], tol: f64) -> bool {
    let scale = ev.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    ev.first().is_none_or(|&min| min >= -tol * scale)
}

/// Positive semidefiniteness up to the relative tolerance `tol`.
pub fn is_psd(m: &SymMatrix, tol: f64) -> Result<bool> {
    if tol < 0.0 || tol.is_nan() {
        return Err(Error::InvalidParams(format!(
            "tolerance {tol} must be >= 0"
        )));
    }
    Ok(psd_from_spectrum(&jacobi_eigenvalues(m)?, tol))
}

/// Number of eigenvalues with |λ| > `rank_tol` · max |λ|.
pub fn rank_from_spectrum(ev: &[f64], rank_tol: f64) -> usize {
    let scale = ev.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    ev.iter().filter(|x| x.abs() > rank_tol * scale).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_psd() {
        assert!(is_psd(&SymMatrix::identity(3), 0.0).unwrap());
        assert_eq!(
            jacobi_eigenvalues(&SymMatrix::identity(3)).unwrap(),
            vec![1.0; 3]
        );
    }

    #[test]
    fn swap_matrix_is_indefinite() {
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ev = jacobi_eigenvalues(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert!(!is_psd(&m, 1e-10).unwrap());
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(is_psd(&m, 0.0), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn known_3x3_spectrum() {
        // tridiagonal 2,-1 matrix: eigenvalues 2 - sqrt2, 2, 2 + sqrt2
        let m = SymMatrix::from_rows(&[
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ])
        .unwrap();
        let ev = jacobi_eigenvalues(&m).unwrap();
        let s = 2f64.sqrt();
        for (a, b) in ev.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn block_solver_matches_full_solver() {
        let m = SymMatrix::from_fn(6, |i, j| {
            if (i + j) % 2 == 0 {
                1.0 / (1.0 + i as f64 + j as f64)
            } else {
                0.0
            }
        });
        assert_eq!(m.components().len(), 2);
        let a = jacobi_eigenvalues(&m).unwrap();
        let b = block_eigenvalues(&m).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn rank_counts_relative_to_largest() {
        assert_eq!(rank_from_spectrum(&[0.0, 1e-14, 0.5, 1.0], 1e-10), 2);
        assert_eq!(rank_from_spectrum(&[0.0, 0.0], 1e-10), 0);
    }
}
