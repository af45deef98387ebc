//! PPT tests for DS states via Hankel blocks of the canonical weights.
//!
//! Across a cut `t | n-t` the state lives in `Sym(t) ⊗ Sym(n-t)`, spanned by
//! `|D_a^t⟩ ⊗ |D_b^{n-t}⟩`. After transposing the first factor, the only
//! surviving entries couple `(a, b)` with `(a', b')` when `b - a = b' - a'`.
//! Each such excitation difference `d` gives one block whose entries are
//! `w_a · q_{a+a'+d} · w_{a'}` with `w_a = sqrt(C(t,a) C(n-t,a+d))`: a
//! positive diagonal congruence of a Hankel window of the `q` sequence.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::ds_state::{binomial, canonical_weights, dicke_split, CanonicalWeights, DSState};
use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigenvalues, psd_from_spectrum, rank_from_spectrum, SymMatrix};

pub const DEFAULT_PSD_TOL: f64 = 1e-9;
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Which numbers fill the Hankel windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// `q_m = p_m / C(n,m)` with the congruence weights of the true partial
    /// transpose.
    #[default]
    Canonical,
    /// Raw `p_m` with unit weights. Kept for comparison only; it does not
    /// describe the partial transpose of a normalized Dicke mixture.
    LiteralP,
}

fn check_partition(n: usize, t: usize) -> Result<()> {
    if t < 1 || t > n / 2 {
        return Err(Error::OutOfRange {
            what: "partition",
            detail: format!("need 1 <= t <= {} for n = {n}, got t = {t}", n / 2),
        });
    }
    Ok(())
}

/// `ρ` (or its partial transpose) on `C^{t+1} ⊗ C^{n-t+1}`, indexed by
/// `a · (n-t+1) + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactBipartite {
    n: usize,
    t: usize,
    entries: SymMatrix,
}

impl CompactBipartite {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.t + 1, self.n - self.t + 1)
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * (self.n - self.t + 1) + b
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.entries
    }

    pub fn entry(&self, (a, b): (usize, usize), (a2, b2): (usize, usize)) -> f64 {
        self.entries.get(self.index(a, b), self.index(a2, b2))
    }

    /// Transposes the first (t-qubit) factor. An involution.
    pub fn partial_transpose(&self) -> CompactBipartite {
        let (da, db) = self.dims();
        let mut out = SymMatrix::zeros(da * db);
        for a in 0..da {
            for b in 0..db {
                for a2 in 0..da {
                    for b2 in 0..db {
                        let v = self.entries.get(a2 * db + b, a * db + b2);
                        out.set(a * db + b, a2 * db + b2, v);
                    }
                }
            }
        }
        CompactBipartite {
            n: self.n,
            t: self.t,
            entries: out,
        }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        jacobi_eigenvalues(&self.entries)
    }
}

/// `ρ = Σ_m p_m v_m v_mᵀ` with `v_m` the split amplitudes of `|D_m^n⟩`.
pub fn compact_bipartite(s: &DSState, t: usize) -> Result<CompactBipartite> {
    let n = s.n();
    check_partition(n, t)?;
    let db = n - t + 1;
    let mut m = SymMatrix::zeros((t + 1) * db);
    for (exc, &pm) in s.p().iter().enumerate() {
        if pm == 0.0 {
            continue;
        }
        let split = dicke_split(n, t, exc)?;
        for (a, x) in split.iter() {
            for (a2, y) in split.iter() {
                m.add(a * db + (exc - a), a2 * db + (exc - a2), pm * x * y);
            }
        }
    }
    Ok(CompactBipartite { n, t, entries: m })
}

pub fn partial_transpose(m: &CompactBipartite) -> CompactBipartite {
    m.partial_transpose()
}

/// Hankel window `entry(i, j) = v_{i+j+k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelBlock {
    k: usize,
    size: usize,
    values: Vec<f64>,
}

impl HankelBlock {
    /// Window of `size × size` starting at offset `k` of `seq`.
    pub fn window(seq: &[f64], k: usize, size: usize) -> HankelBlock {
        HankelBlock {
            k,
            size,
            values: seq[k..k + 2 * size - 1].to_vec(),
        }
    }

    pub fn offset(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.values[i + j]
    }

    pub fn to_matrix(&self) -> SymMatrix {
        SymMatrix::from_fn(self.size, |i, j| self.entry(i, j))
    }

    /// Last sequence index covered.
    fn last(&self) -> usize {
        self.k + 2 * (self.size - 1)
    }

    /// True if `self` is a contiguous principal submatrix of `other`.
    fn is_within(&self, other: &HankelBlock) -> bool {
        self.k >= other.k && (self.k - other.k).is_multiple_of(2) && self.last() <= other.last()
    }
}

/// One diagonal block of the compact partial transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct PtBlock {
    /// Excitation difference `b - a` shared by all rows of the block.
    pub d: isize,
    pub hankel: HankelBlock,
    pub weights: Vec<f64>,
}

impl PtBlock {
    pub fn to_matrix(&self) -> SymMatrix {
        let w = &self.weights;
        SymMatrix::from_fn(self.hankel.size, |i, j| {
            w[i] * self.hankel.entry(i, j) * w[j]
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.hankel.size == 1 {
            return Ok(vec![self.to_matrix().get(0, 0)]);
        }
        jacobi_eigenvalues(&self.to_matrix())
    }
}

/// Every block of the partial transpose across `t | n-t`, in order of `d`.
pub fn pt_blocks(s: &DSState, t: usize, convention: Convention) -> Result<Vec<PtBlock>> {
    let n = s.n();
    check_partition(n, t)?;
    let seq: Vec<f64> = match convention {
        Convention::Canonical => canonical_weights(s).q().to_vec(),
        Convention::LiteralP => s.p().to_vec(),
    };
    let (ti, ri) = (t as isize, (n - t) as isize);
    let mut out = Vec::new();
    for d in -ti..=ri {
        let lo = (-d).max(0);
        let hi = ti.min(ri - d);
        let size = (hi - lo + 1) as usize;
        let k = (2 * lo + d) as usize;
        let weights = (lo..=hi)
            .map(|a| match convention {
                Convention::Canonical => {
                    (binomial(t, a as usize) * binomial(n - t, (a + d) as usize)).sqrt()
                }
                Convention::LiteralP => 1.0,
            })
            .collect();
        out.push(PtBlock {
            d,
            hankel: HankelBlock::window(&seq, k, size),
            weights,
        });
    }
    Ok(out)
}

/// Maximal Hankel windows of `q` whose positivity decides PPT across
/// `t | n-t`. At `t = n/2` (n even) these are the two matrices
/// `M_0 = [q_{i+j}]` and `M_1 = [q_{i+j+1}]`.
pub fn hankel_blocks(q: &CanonicalWeights, t: usize) -> Result<Vec<HankelBlock>> {
    let n = q.n();
    check_partition(n, t)?;
    let seq = q.q();
    let (ti, ri) = (t as isize, (n - t) as isize);
    let mut all: Vec<HankelBlock> = (-ti..=ri)
        .map(|d| {
            let lo = (-d).max(0);
            let hi = ti.min(ri - d);
            HankelBlock::window(seq, (2 * lo + d) as usize, (hi - lo + 1) as usize)
        })
        .collect();
    all.sort_by(|x, y| x.k.cmp(&y.k).then(y.size.cmp(&x.size)));
    all.dedup_by(|x, y| x.k == y.k && x.size == y.size);
    let maximal = all
        .iter()
        .filter(|b| !all.iter().any(|o| o != *b && b.is_within(o)))
        .cloned()
        .collect();
    Ok(maximal)
}

/// Spectrum of the partial transpose across `t | n-t` restricted to its
/// support, sorted ascending.
pub fn pt_spectrum(s: &DSState, t: usize, convention: Convention) -> Result<Vec<f64>> {
    let mut ev = Vec::new();
    for b in pt_blocks(s, t, convention)? {
        ev.extend(b.eigenvalues()?);
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// PPT across `t | n-t` at relative tolerance `tol`.
pub fn ppt_at(s: &DSState, t: usize, tol: f64, convention: Convention) -> Result<bool> {
    Ok(psd_from_spectrum(&pt_spectrum(s, t, convention)?, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    TriviallySeparable,
    Separable,
    Entangled,
}

impl Verdict {
    pub fn is_separable(self) -> bool {
        !matches!(self, Verdict::Entangled)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::TriviallySeparable => "TriviallySeparable",
            Verdict::Separable => "Separable",
            Verdict::Entangled => "Entangled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub psd_tol: f64,
    pub rank_tol: f64,
    pub convention: Convention,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            psd_tol: DEFAULT_PSD_TOL,
            rank_tol: DEFAULT_RANK_TOL,
            convention: Convention::Canonical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    #[serde(rename = "ppt")]
    pub ppt_by_partition: BTreeMap<usize, bool>,
    pub npt_witness: Option<usize>,
    pub full_rank: bool,
    #[serde(serialize_with = "triple_as_array")]
    pub tri_rank: (usize, usize, usize),
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    pub e: Option<[f64; 4]>,
}

fn triple_as_array<S: Serializer>(
    t: &(usize, usize, usize),
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [t.0, t.1, t.2].serialize(s)
}

impl ClassificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

pub fn classify(s: &DSState, tol: f64) -> Result<ClassificationReport> {
    classify_with(
        s,
        &ClassifyOptions {
            psd_tol: tol,
            ..ClassifyOptions::default()
        },
    )
}

/// Decides separability: trivially separable if supported on `{0, n}`,
/// otherwise separable iff full rank and PPT across the balanced cut.
pub fn classify_with(s: &DSState, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let n = s.n();
    let half = n / 2;
    let e = if n == 4 {
        let v = n4_inequalities(s)?;
        Some([v.e1, v.e2, v.e3, v.f2])
    } else {
        None
    };
    let tri = tri_rank_with(s, opts.rank_tol, opts.convention)?;
    let full_rank = s.is_full_rank();

    let mut ppt = BTreeMap::new();
    for t in 1..=half {
        ppt.insert(t, ppt_at(s, t, opts.psd_tol, opts.convention)?);
    }

    if s.is_trivial() {
        return Ok(ClassificationReport {
            verdict: Verdict::TriviallySeparable,
            ppt_by_partition: ppt,
            npt_witness: None,
            full_rank,
            tri_rank: tri,
            e,
        });
    }

    let balanced_ppt = ppt.get(&half).copied().unwrap_or(true);
    let verdict = if full_rank && balanced_ppt {
        Verdict::Separable
    } else {
        Verdict::Entangled
    };
    let npt_witness = match verdict {
        Verdict::Entangled => Some(first_npt(&ppt).unwrap_or_else(|| {
            // rank deficiency without a visible negative eigenvalue at
            // this tolerance: look again with a strict threshold
            (1..=half)
                .find(|&t| !ppt_at(s, t, 0.0, opts.convention).unwrap_or(true))
                .unwrap_or(half)
        })),
        _ => None,
    };
    Ok(ClassificationReport {
        verdict,
        ppt_by_partition: ppt,
        npt_witness,
        full_rank,
        tri_rank: tri,
        e,
    })
}

fn first_npt(ppt: &BTreeMap<usize, bool>) -> Option<usize> {
    ppt.iter().find(|(_, &ok)| !ok).map(|(&t, _)| t)
}

/// `(r(ρ), r(ρ^{Γ_1}), r(ρ^{Γ_{n/2}}))`.
pub fn tri_rank(s: &DSState, rank_tol: f64) -> Result<(usize, usize, usize)> {
    tri_rank_with(s, rank_tol, Convention::Canonical)
}

pub fn tri_rank_with(
    s: &DSState,
    rank_tol: f64,
    convention: Convention,
) -> Result<(usize, usize, usize)> {
    let r0 = rank_from_spectrum(s.p(), rank_tol);
    if s.n() < 2 {
        return Ok((r0, r0, r0));
    }
    let r1 = rank_from_spectrum(&pt_spectrum(s, 1, convention)?, rank_tol);
    let r2 = rank_from_spectrum(&pt_spectrum(s, s.n() / 2, convention)?, rank_tol);
    Ok((r0, r1, r2))
}

/// The four polynomial boundaries of the N = 4 PPT region, as printed, plus
/// `432 · det M_0(q)` for comparison with `f2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct N4Inequalities {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub f2: f64,
    pub det_m0: f64,
}

pub fn n4_inequalities(s: &DSState) -> Result<N4Inequalities> {
    if s.n() != 4 {
        return Err(Error::WrongN(s.n()));
    }
    Ok(n4_inequalities_raw(s.p()))
}

/// Homogeneous, so it also accepts unnormalized weights.
pub fn n4_inequalities_raw(p: &[f64]) -> N4Inequalities {
    let (p0, p1, p2, p3, p4) = (p[0], p[1], p[2], p[3], p[4]);
    N4Inequalities {
        e1: 8.0 * p0 * p2 - 3.0 * p1 * p1,
        e2: 9.0 * p1 * p3 - 4.0 * p2 * p2,
        e3: 8.0 * p2 * p4 - 3.0 * p3 * p3,
        f2: p4 * (72.0 * p0 * p2 - 27.0 * p1 * p1)
            - 2.0 * p2 * p2 * p2
            - 9.0 * p3 * (p1 * p2 + 3.0 * p0 * p3),
        det_m0: 72.0 * p0 * p2 * p4 + 9.0 * p1 * p2 * p3
            - 2.0 * p2 * p2 * p2
            - 27.0 * p0 * p3 * p3
            - 27.0 * p1 * p1 * p4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ds_state::{jc_coefficients, jc_state, make_ds};
    use crate::linalg::{is_psd, jacobi_eigenvalues};

    fn uniform4() -> DSState {
        make_ds(4, &[1.0; 5]).unwrap()
    }

    #[test]
    fn compact_product_state() {
        let c = compact_bipartite(&DSState::dicke(4, 0).unwrap(), 2).unwrap();
        assert_eq!(c.dims(), (3, 3));
        for i in 0..9 {
            for j in 0..9 {
                let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert_eq!(c.matrix().get(i, j), want);
            }
        }
        assert!(compact_bipartite(&uniform4(), 3).is_err());
        assert!(compact_bipartite(&uniform4(), 0).is_err());
    }

    #[test]
    fn compact_preserves_spectrum() {
        let c = compact_bipartite(&uniform4(), 2).unwrap();
        let ev = c.eigenvalues().unwrap();
        assert_eq!(ev.len(), 9);
        for x in &ev[..4] {
            assert!(x.abs() < 1e-12);
        }
        for x in &ev[4..] {
            assert!((x - 0.2).abs() < 1e-12);
        }
        assert!((c.matrix().trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn compact_respects_excitation_rule() {
        let s = make_ds(4, &[0.1, 0.2, 0.3, 0.25, 0.15]).unwrap();
        for t in 1..=2 {
            let c = compact_bipartite(&s, t).unwrap();
            let pt = c.partial_transpose();
            let (da, db) = c.dims();
            for a in 0..da {
                for b in 0..db {
                    for a2 in 0..da {
                        for b2 in 0..db {
                            if a + b != a2 + b2 {
                                assert_eq!(c.entry((a, b), (a2, b2)), 0.0);
                            }
                            if a2 + b != a + b2 {
                                assert_eq!(pt.entry((a, b), (a2, b2)), 0.0);
                            }
                        }
                    }
                }
            }
            assert_eq!(pt.partial_transpose(), c);
        }
    }

    #[test]
    fn transpose_leaves_diagonal_matrix_alone() {
        let c = compact_bipartite(&DSState::dicke(4, 2).unwrap(), 2).unwrap();
        let diag = CompactBipartite {
            n: 4,
            t: 2,
            entries: SymMatrix::from_fn(9, |i, j| if i == j { c.matrix().get(i, i) } else { 0.0 }),
        };
        assert_eq!(diag.partial_transpose(), diag);
    }

    #[test]
    fn pt_blocks_reassemble_the_compact_transpose() {
        let s = make_ds(5, &[0.05, 0.2, 0.1, 0.3, 0.25, 0.1]).unwrap();
        for t in 1..=2 {
            let pt = compact_bipartite(&s, t).unwrap().partial_transpose();
            let db = 5 - t + 1;
            for blk in pt_blocks(&s, t, Convention::Canonical).unwrap() {
                let lo = (-blk.d).max(0) as usize;
                let m = blk.to_matrix();
                for i in 0..m.dim() {
                    for j in 0..m.dim() {
                        let (a, a2) = (lo + i, lo + j);
                        let (b, b2) = (
                            (a as isize + blk.d) as usize,
                            (a2 as isize + blk.d) as usize,
                        );
                        let want = pt.matrix().get(a * db + b, a2 * db + b2);
                        assert!((m.get(i, j) - want).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn hankel_blocks_n4() {
        let q = canonical_weights(&make_ds(4, &[0.1, 0.2, 0.3, 0.25, 0.15]).unwrap());
        let v = q.q();
        let bl = hankel_blocks(&q, 2).unwrap();
        assert_eq!(bl.len(), 2);
        assert_eq!((bl[0].offset(), bl[0].size()), (0, 3));
        assert_eq!((bl[1].offset(), bl[1].size()), (1, 2));
        let m0 = bl[0].to_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m0.get(i, j), v[i + j]);
            }
        }
        let m1 = bl[1].to_matrix();
        assert_eq!(m1.as_slice(), &[v[1], v[2], v[2], v[3]]);

        let bl = hankel_blocks(&q, 1).unwrap();
        assert_eq!(bl.len(), 3);
        for (d, b) in bl.iter().enumerate() {
            assert_eq!((b.offset(), b.size()), (d, 2));
            assert_eq!(
                b.to_matrix().as_slice(),
                &[v[d], v[d + 1], v[d + 1], v[d + 2]]
            );
        }
    }

    #[test]
    fn hankel_blocks_n5() {
        let q = canonical_weights(&make_ds(5, &[1.0; 6]).unwrap());
        let bl = hankel_blocks(&q, 2).unwrap();
        let shape: Vec<_> = bl.iter().map(|b| (b.offset(), b.size())).collect();
        assert_eq!(shape, vec![(0, 3), (1, 3)]);
        assert!(hankel_blocks(&q, 3).is_err());
    }

    #[test]
    fn uniform_m0_is_psd() {
        let q = canonical_weights(&uniform4());
        let m0 = hankel_blocks(&q, 2).unwrap()[0].to_matrix();
        let want = SymMatrix::from_rows(&[
            vec![0.2, 0.05, 1.0 / 30.0],
            vec![0.05, 1.0 / 30.0, 0.05],
            vec![1.0 / 30.0, 0.05, 0.2],
        ])
        .unwrap();
        assert!(m0.max_abs_diff(&want) < 1e-16);
        assert!(is_psd(&m0, 0.0).unwrap());
    }

    #[test]
    fn classify_examples() {
        let r = classify(&make_ds(4, &[0.3, 0.0, 0.0, 0.0, 0.7]).unwrap(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::TriviallySeparable);

        let r = classify(&DSState::dicke(4, 1).unwrap(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Entangled);
        assert_eq!(r.npt_witness, Some(1));
        // M_0 = [[0,q1,0],[q1,0,0],[0,0,0]] has eigenvalue -q1 = -1/4
        let m0 = hankel_blocks(&canonical_weights(&DSState::dicke(4, 1).unwrap()), 2).unwrap()[0]
            .to_matrix();
        assert!((jacobi_eigenvalues(&m0).unwrap()[0] + 0.25).abs() < 1e-15);

        let r = classify(&uniform4(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Separable);
        assert_eq!(r.tri_rank, (5, 8, 9));
        assert!(r.ppt_by_partition.values().all(|&x| x));

        // interior zero, not trivially separable
        let r = classify(&make_ds(4, &[0.3, 0.2, 0.0, 0.2, 0.3]).unwrap(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Entangled);
        assert!(!r.full_rank);
    }

    #[test]
    fn n1_is_trivially_separable() {
        let r = classify(&make_ds(1, &[0.4, 0.6]).unwrap(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::TriviallySeparable);
        assert!(r.ppt_by_partition.is_empty());
    }

    #[test]
    fn tri_rank_examples() {
        assert_eq!(tri_rank(&uniform4(), 1e-10).unwrap(), (5, 8, 9));
        assert_eq!(
            tri_rank(&DSState::dicke(4, 0).unwrap(), 1e-10).unwrap(),
            (1, 1, 1)
        );
        assert_eq!(tri_rank(&jc_state(2.0, 1.0).unwrap(), 1e-10).unwrap().0, 5);
    }

    #[test]
    fn n4_inequality_examples() {
        let v = n4_inequalities(&uniform4()).unwrap();
        for (x, y) in [v.e1, v.e2, v.e3, v.f2].iter().zip([0.2, 0.2, 0.2, 0.056]) {
            assert!((x - y).abs() < 1e-15, "{x} vs {y}");
        }
        let v = n4_inequalities_raw(&jc_coefficients(2.0, 1.0).unwrap());
        assert_eq!((v.e1, v.e2), (0.0, 0.0));
        assert!((v.e3 - 0.1875).abs() < 1e-15);
        assert!((v.f2 + 3.375).abs() < 1e-15);
        assert!(v.det_m0.abs() < 1e-15);
        let v = n4_inequalities(&DSState::dicke(4, 1).unwrap()).unwrap();
        assert_eq!((v.e1, v.e2, v.e3, v.f2), (-3.0, 0.0, 0.0, 0.0));
        assert_eq!(
            n4_inequalities(&make_ds(3, &[1.0; 4]).unwrap()),
            Err(Error::WrongN(3))
        );
    }

    #[test]
    fn det_form_is_scaled_hankel_determinant() {
        let p = [0.11, 0.23, 0.31, 0.2, 0.15];
        let q: Vec<f64> = p
            .iter()
            .enumerate()
            .map(|(m, x)| x / binomial(4, m))
            .collect();
        let det = q[0] * (q[2] * q[4] - q[3] * q[3]) - q[1] * (q[1] * q[4] - q[2] * q[3])
            + q[2] * (q[1] * q[3] - q[2] * q[2]);
        assert!((n4_inequalities_raw(&p).det_m0 - 432.0 * det).abs() < 1e-14);
    }
}
