//! Brute-force reference constructions in the full `2^n` computational basis.
//!
//! Nothing here exploits permutation symmetry; it exists so tests can check
//! the compact and Hankel paths against plain linear algebra. Qubit `i` is
//! bit `i` of the basis index, and `|0⟩` is the `σ_z = +1` eigenstate.

use std::fmt::Write as _;

use crate::bell::{BellParams, DeviceAngles};
use crate::ds_state::{binomial, DSState};
use crate::error::{Error, Result};
use crate::linalg::{block_eigenvalues, psd_from_spectrum, SymMatrix};

pub const MAX_QUBITS: usize = 12;
pub const MAX_BELL_QUBITS: usize = 10;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::SizeCap { n, cap })
    } else {
        Ok(())
    }
}

/// Real symmetric `2^n × 2^n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    mat: SymMatrix,
}

impl DenseMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// `⟨v| M |v⟩`.
    pub fn expectation(&self, v: &[f64]) -> f64 {
        self.mat.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// One row per line, comma separated, shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let mut out = String::with_capacity(d * d * 4);
        for i in 0..d {
            for j in 0..d {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{}", self.get(i, j)).expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }
}

/// Amplitudes of `|D_k^n⟩`.
pub fn dense_dicke(n: usize, k: usize) -> Result<Vec<f64>> {
    check_cap(n, MAX_QUBITS)?;
    if k > n {
        return Err(Error::OutOfRange {
            what: "Dicke index",
            detail: format!("k = {k} > n = {n}"),
        });
    }
    let amp = binomial(n, k).sqrt().recip();
    Ok((0..1usize << n)
        .map(|x| {
            if x.count_ones() as usize == k {
                amp
            } else {
                0.0
            }
        })
        .collect())
}

/// `u ⊗ v` with `u` on the low qubits.
pub fn kron(u: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for y in v {
        out.extend(u.iter().map(|x| x * y));
    }
    out
}

/// `Σ_k p_k |D_k⟩⟨D_k|`. Between two weight-`k` strings the entry is
/// `p_k / C(n, k)`.
pub fn dense_ds(s: &DSState) -> Result<DenseMatrix> {
    let n = s.n();
    check_cap(n, MAX_QUBITS)?;
    let q: Vec<f64> = s
        .p()
        .iter()
        .enumerate()
        .map(|(k, p)| p / binomial(n, k))
        .collect();
    let mat = SymMatrix::from_fn(1 << n, |i, j| {
        let w = i.count_ones();
        if w == j.count_ones() {
            q[w as usize]
        } else {
            0.0
        }
    });
    Ok(DenseMatrix { n, mat })
}

/// Partial transpose on the qubits set in `mask`.
pub fn dense_pt(m: &DenseMatrix, mask: usize) -> Result<DenseMatrix> {
    if mask >> m.n != 0 {
        return Err(Error::OutOfRange {
            what: "qubit mask",
            detail: format!("{mask:#b} exceeds {} qubits", m.n),
        });
    }
    let keep = !mask;
    let mat = SymMatrix::from_fn(m.dim(), |i, j| {
        let (i2, j2) = ((i & keep) | (j & mask), (j & keep) | (i & mask));
        m.get(i2, j2)
    });
    Ok(DenseMatrix { n: m.n, mat })
}

/// Mask of the first `t` qubits.
pub fn first_qubits(t: usize) -> usize {
    (1usize << t) - 1
}

/// Full spectrum, ascending.
pub fn eigenvalues_sym(m: &DenseMatrix) -> Result<Vec<f64>> {
    block_eigenvalues(&m.mat)
}

/// PPT test done the slow way: dense partial transpose on `mask`, full
/// spectrum, same relative threshold as the fast path.
pub fn dense_ppt(s: &DSState, mask: usize, tol: f64) -> Result<bool> {
    let pt = dense_pt(&dense_ds(s)?, mask)?;
    Ok(psd_from_spectrum(&eigenvalues_sym(&pt)?, tol))
}

/// Restriction of a dense operator to `Sym(t) ⊗ Sym(n-t)`, ordered like
/// the compact bipartite representation: index `a·(n-t+1) + b`.
pub fn project_bipartite(m: &DenseMatrix, t: usize) -> Result<SymMatrix> {
    let n = m.n;
    if t == 0 || t >= n {
        return Err(Error::OutOfRange {
            what: "partition",
            detail: format!("t = {t} for n = {n}"),
        });
    }
    let nb = n - t + 1;
    let mut basis = Vec::with_capacity((t + 1) * nb);
    for a in 0..=t {
        let u = dense_dicke(t, a)?;
        for b in 0..nb {
            basis.push(kron(&u, &dense_dicke(n - t, b)?));
        }
    }
    let images: Vec<Vec<f64>> = basis.iter().map(|v| m.mat.mul_vec(v)).collect();
    Ok(SymMatrix::from_fn(basis.len(), |i, j| {
        basis[i].iter().zip(&images[j]).map(|(a, b)| a * b).sum()
    }))
}

/// `cos x σ_z + sin x σ_x` as a 2×2 array indexed by bit values.
fn measurement(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = angle.sin_cos();
    [[c, s], [s, -c]]
}

/// The Bell operator assembled site by site.
pub fn dense_bell(n: usize, params: &BellParams, angles: &DeviceAngles) -> Result<DenseMatrix> {
    check_cap(n, MAX_BELL_QUBITS)?;
    if params.n != n {
        return Err(Error::DimensionMismatch {
            expected: params.n + 1,
            actual: n + 1,
        });
    }
    let m0 = measurement(angles.phi());
    let m1 = measurement(angles.theta());
    let one_body = [
        [
            params.alpha * m0[0][0] + params.beta * m1[0][0],
            params.alpha * m0[0][1] + params.beta * m1[0][1],
        ],
        [
            params.alpha * m0[1][0] + params.beta * m1[1][0],
            params.alpha * m0[1][1] + params.beta * m1[1][1],
        ],
    ];
    let dim = 1usize << n;
    let mut mat = SymMatrix::zeros(dim);
    let bit = |x: usize, i: usize| (x >> i) & 1;
    for x in 0..dim {
        mat.add(x, x, params.beta_c);
        for i in 0..n {
            for fi in 0..2 {
                let y = x ^ (fi << i);
                mat.add(x, y, one_body[bit(x, i)][bit(y, i)]);
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                for fi in 0..2 {
                    for fj in 0..2 {
                        let y = x ^ (fi << i) ^ (fj << j);
                        let (xi, yi, xj, yj) = (bit(x, i), bit(y, i), bit(x, j), bit(y, j));
                        let v = 0.5 * params.gamma * m0[xi][yi] * m0[xj][yj]
                            + params.delta * m0[xi][yi] * m1[xj][yj]
                            + 0.5 * params.epsilon * m1[xi][yi] * m1[xj][yj];
                        mat.add(x, y, v);
                    }
                }
            }
        }
    }
    Ok(DenseMatrix { n, mat })
}
