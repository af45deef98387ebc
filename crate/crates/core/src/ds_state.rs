//! Diagonal symmetric states: mixtures of Dicke projectors.
//!
//! A DS state on `n` qubits is the vector of weights `p_0..p_n` on the
//! projectors `|D_k⟩⟨D_k|`. In the computational basis every matrix element
//! between two bitstrings of Hamming weight `m` equals `q_m = p_m / C(n, m)`;
//! those canonical weights are what the Hankel tests operate on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries more negative than this are rejected; smaller excursions are
/// clamped to zero.
pub const NEGATIVE_WEIGHT_TOL: f64 = 1e-12;

/// Binomial coefficient as f64. Exact for every `n` this crate touches.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Mixture of Dicke projectors, `ρ = Σ_k p_k |D_k^n⟩⟨D_k^n|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct DSState {
    n: usize,
    p: Vec<f64>,
    renormalized: bool,
}

impl PartialEq for DSState {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.p == other.p
    }
}

#[derive(Serialize, Deserialize)]
struct RawState {
    n: usize,
    p: Vec<f64>,
}

impl TryFrom<RawState> for DSState {
    type Error = Error;

    fn try_from(raw: RawState) -> Result<Self> {
        make_ds(raw.n, &raw.p)
    }
}

impl From<DSState> for RawState {
    fn from(s: DSState) -> Self {
        RawState { n: s.n, p: s.p }
    }
}

impl DSState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// True when the input weights did not already sum to one.
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    /// The pure Dicke state `|D_k^n⟩`.
    pub fn dicke(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::OutOfRange {
                what: "Dicke index",
                detail: format!("k = {k} > n = {n}"),
            });
        }
        let mut w = vec![0.0; n + 1];
        w[k] = 1.0;
        make_ds(n, &w)
    }

    /// Support contained in `{0, n}`: a mixture of `|0…0⟩` and `|1…1⟩`.
    pub fn is_trivial(&self) -> bool {
        self.p[1..self.n].iter().all(|&x| x == 0.0)
    }

    /// Every weight strictly positive.
    pub fn is_full_rank(&self) -> bool {
        self.p.iter().all(|&x| x > 0.0)
    }

    /// `λ·self + (1-λ)·other`.
    pub fn mix(&self, other: &DSState, lambda: f64) -> Result<DSState> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                actual: other.n + 1,
            });
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParams(format!("mixing weight {lambda}")));
        }
        let w: Vec<f64> = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        make_ds(self.n, &w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("DSState serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Parses `n,p0,...,pN`.
    pub fn from_csv_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim().split(',').map(str::trim).collect();
        let n: usize = fields[0].parse().map_err(|_| Error::Parse {
            location: "field 1".into(),
            message: format!("qubit count `{}` is not a non-negative integer", fields[0]),
        })?;
        let p = fields[1..]
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    location: format!("field {}", i + 2),
                    message: format!("weight `{f}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        make_ds(n, &p)
    }

    pub fn to_csv_line(&self) -> String {
        let mut s = self.n.to_string();
        for x in &self.p {
            s.push(',');
            s.push_str(&x.to_string());
        }
        s
    }

    /// Reads either a JSON object or a CSV line, whichever the text looks like.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            Self::from_json(t)
        } else {
            let line = t
                .lines()
                .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
                .ok_or_else(|| Error::Parse {
                    location: "input".into(),
                    message: "no state found".into(),
                })?;
            Self::from_csv_line(line)
        }
    }
}

/// Builds a DS state from non-negative weights, normalizing them to sum to one.
pub fn make_ds(n: usize, weights: &[f64]) -> Result<DSState> {
    if n < 1 {
        return Err(Error::OutOfRange {
            what: "qubit count",
            detail: "n must be at least 1".into(),
        });
    }
    if weights.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            actual: weights.len(),
        });
    }
    let mut p = Vec::with_capacity(n + 1);
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFiniteWeight { index });
        }
        if value < -NEGATIVE_WEIGHT_TOL {
            return Err(Error::NegativeWeight { index, value });
        }
        p.push(value.max(0.0));
    }
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllZero);
    }
    // already-normalized input is kept bit-for-bit
    let renormalized = (total - 1.0).abs() > 1e-12;
    if renormalized {
        p.iter_mut().for_each(|x| *x /= total);
    }
    Ok(DSState { n, p, renormalized })
}

/// Canonical-basis matrix elements `q_m = p_m / C(n, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalWeights {
    n: usize,
    q: Vec<f64>,
}

impl CanonicalWeights {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Multiplies back by the binomials.
    pub fn to_probabilities(&self) -> Vec<f64> {
        self.q
            .iter()
            .enumerate()
            .map(|(m, q)| q * binomial(self.n, m))
            .collect()
    }
}

pub fn canonical_weights(s: &DSState) -> CanonicalWeights {
    let q =
        s.p.iter()
            .enumerate()
            .map(|(m, p)| p / binomial(s.n, m))
            .collect();
    CanonicalWeights { n: s.n, q }
}

/// Schmidt-like split of `|D_m^n⟩` across the first `t` qubits:
/// `|D_m^n⟩ = Σ_a amp[a] |D_a^t⟩ ⊗ |D_{m-a}^{n-t}⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeSplit {
    pub n: usize,
    pub t: usize,
    pub m: usize,
    a_min: usize,
    amp: Vec<f64>,
}

impl DickeSplit {
    /// Smallest excitation count on the first block with nonzero amplitude.
    pub fn a_min(&self) -> usize {
        self.a_min
    }

    pub fn a_max(&self) -> usize {
        self.a_min + self.amp.len() - 1
    }

    /// Amplitude for `a` excitations on the first `t` qubits, if present.
    pub fn amp(&self, a: usize) -> Option<f64> {
        a.checked_sub(self.a_min)
            .and_then(|i| self.amp.get(i).copied())
    }

    /// `(a, amplitude)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.amp
            .iter()
            .enumerate()
            .map(move |(i, &x)| (self.a_min + i, x))
    }
}

pub fn dicke_split(n: usize, t: usize, m: usize) -> Result<DickeSplit> {
    if t < 1 || t + 1 > n || m > n {
        return Err(Error::OutOfRange {
            what: "split",
            detail: format!("need 1 <= t <= n-1 and m <= n, got n={n}, t={t}, m={m}"),
        });
    }
    let a_min = m.saturating_sub(n - t);
    let a_max = t.min(m);
    let norm = binomial(n, m);
    let amp = (a_min..=a_max)
        .map(|a| (binomial(t, a) * binomial(n - t, m - a) / norm).sqrt())
        .collect();
    Ok(DickeSplit {
        n,
        t,
        m,
        a_min,
        amp,
    })
}

/// Dicke-basis operator with coherences only between equal-parity
/// excitation numbers; PT-invariant for every bipartition.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    n: usize,
    mat: Vec<f64>,
}

impl ExtendedState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn entry(&self, m: usize, l: usize) -> f64 {
        self.mat[m * (self.n + 1) + l]
    }

    pub fn to_matrix(&self) -> crate::linalg::SymMatrix {
        crate::linalg::SymMatrix::from_fn(self.n + 1, |i, j| self.entry(i, j))
    }

    pub fn to_operator(&self) -> DickeOperator {
        DickeOperator {
            n: self.n,
            entries: self.mat.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }
}

/// Builds `ρ_EXT`: entry `(m, l)` with `m + l` even is
/// `sqrt(C(n,m) C(n,l)) · q_{(m+l)/2}`.
///
/// The diagonal reproduces `p`, and the even/odd excitation sectors are
/// congruent to the Hankel matrices `[q_{i+j}]` and `[q_{i+j+1}]`, so the
/// operator is PSD exactly when both Hankel blocks are.
pub fn build_extended(s: &DSState) -> ExtendedState {
    let n = s.n;
    let q = canonical_weights(s);
    let dim = n + 1;
    let mut mat = vec![0.0; dim * dim];
    for m in 0..dim {
        for l in 0..dim {
            if (m + l) % 2 == 0 {
                mat[m * dim + l] = if m == l {
                    s.p[m]
                } else {
                    (binomial(n, m) * binomial(n, l)).sqrt() * q.q[(m + l) / 2]
                };
            }
        }
    }
    ExtendedState { n, mat }
}

/// Complex Hermitian operator on the symmetric subspace, in the Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeOperator {
    n: usize,
    entries: Vec<Complex64>,
}

impl DickeOperator {
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = n + 1;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(DickeOperator { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, m: usize, l: usize) -> Complex64 {
        self.entries[m * (self.n + 1) + l]
    }
}

/// Phase-averages a symmetric-subspace operator onto the Dicke diagonal.
///
/// Averaging `U^{⊗n} ρ U^{†⊗n}` with `U = diag(1, e^{iφ})` over φ multiplies
/// entry `(m, l)` by `e^{i(m-l)φ}`, so only the diagonal survives.
pub fn dephase_to_ds(op: &DickeOperator) -> Result<DSState> {
    let dim = op.n + 1;
    let mut worst = 0.0f64;
    for m in 0..dim {
        for l in m..dim {
            worst = worst.max((op.entry(m, l) - op.entry(l, m).conj()).norm());
        }
    }
    if worst > 1e-12 {
        return Err(Error::NotHermitian(worst));
    }
    let diag: Vec<f64> = (0..dim).map(|k| op.entry(k, k).re).collect();
    let trace: f64 = diag.iter().sum();
    if (trace - 1.0).abs() > 1e-9 {
        return Err(Error::TraceMismatch(trace));
    }
    make_ds(op.n, &diag)
}

/// Unnormalized Jaynes–Cummings coefficients
/// `(a/4, 1, 3/(2a), 1/a², 1/(4a²b))`.
pub fn jc_coefficients(a: f64, b: f64) -> Result<[f64; 5]> {
    if !(a.is_finite() && b.is_finite()) || b <= 0.0 || a <= b {
        return Err(Error::InvalidParams(format!(
            "Jaynes-Cummings family needs a > b > 0, got a = {a}, b = {b}"
        )));
    }
    Ok([
        a / 4.0,
        1.0,
        3.0 / (2.0 * a),
        1.0 / (a * a),
        1.0 / (4.0 * a * a * b),
    ])
}

pub fn jc_state(a: f64, b: f64) -> Result<DSState> {
    make_ds(4, &jc_coefficients(a, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn uniform_normalization() {
        let s = make_ds(4, &[1.0; 5]).unwrap();
        assert!(s.p().iter().all(|&x| close(x, 0.2, 1e-15)));
        assert!(s.was_renormalized());
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(matches!(
            make_ds(4, &[1.0, 0.0, 0.0, 0.0, -0.1]),
            Err(Error::NegativeWeight { index: 4, .. })
        ));
        assert!(matches!(
            make_ds(4, &[1.0, 0.0]),
            Err(Error::DimensionMismatch {
                expected: 5,
                actual: 2
            })
        ));
        assert_eq!(make_ds(2, &[0.0; 3]), Err(Error::AllZero));
        assert!(make_ds(0, &[1.0]).is_err());
        assert!(make_ds(1, &[f64::NAN, 1.0]).is_err());
        // tiny negative rounding noise is clamped
        let s = make_ds(2, &[0.5, -1e-14, 0.5]).unwrap();
        assert_eq!(s.p()[1], 0.0);
    }

    #[test]
    fn jc_coefficients_normalize_by_their_sum() {
        let w = jc_coefficients(2.0, 1.0).unwrap();
        assert_eq!(w, [0.5, 1.0, 0.75, 0.25, 0.0625]);
        let total: f64 = w.iter().sum();
        assert_eq!(total, 2.5625);
        let s = jc_state(2.0, 1.0).unwrap();
        for (x, y) in s.p().iter().zip(w) {
            assert!(close(*x, y / 2.5625, 1e-15));
        }
        assert!(jc_state(1.0, 2.0).is_err());
        assert!(jc_state(2.0, 0.0).is_err());
    }

    #[test]
    fn canonical_weights_examples() {
        let u = make_ds(4, &[1.0; 5]).unwrap();
        let q = canonical_weights(&u);
        for (x, y) in q.q().iter().zip([0.2, 0.05, 1.0 / 30.0, 0.05, 0.2]) {
            assert!(close(*x, y, 1e-15));
        }
        let e0 = DSState::dicke(4, 0).unwrap();
        assert_eq!(canonical_weights(&e0).q(), &[1.0, 0.0, 0.0, 0.0, 0.0]);

        // JC coefficients divided by (1,4,6,4,1)
        let jc = jc_coefficients(2.0, 1.0).unwrap();
        let qs: Vec<f64> = jc
            .iter()
            .enumerate()
            .map(|(m, x)| x / binomial(4, m))
            .collect();
        assert_eq!(qs, vec![0.5, 0.25, 0.125, 0.0625, 0.0625]);
        let qn = canonical_weights(&jc_state(2.0, 1.0).unwrap());
        for (x, y) in qn.q().iter().zip(&qs) {
            assert!(close(*x * 2.5625, *y, 1e-15));
        }
    }

    #[test]
    fn dicke_split_examples() {
        let s = dicke_split(4, 2, 2).unwrap();
        let want = [
            (1.0f64 / 6.0).sqrt(),
            (4.0f64 / 6.0).sqrt(),
            (1.0f64 / 6.0).sqrt(),
        ];
        assert_eq!(s.a_min(), 0);
        for (a, w) in want.iter().enumerate() {
            assert!(close(s.amp(a).unwrap(), *w, 1e-15));
        }
        let s = dicke_split(4, 1, 0).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![(0, 1.0)]);
        let s = dicke_split(4, 1, 1).unwrap();
        assert!(close(s.amp(0).unwrap(), 0.75f64.sqrt(), 1e-15));
        assert!(close(s.amp(1).unwrap(), 0.25f64.sqrt(), 1e-15));
        // m > n - t forces excitations onto the first block
        let s = dicke_split(4, 1, 4).unwrap();
        assert_eq!(s.a_min(), 1);
        assert_eq!(s.amp(0), None);
        assert!(dicke_split(4, 0, 1).is_err());
        assert!(dicke_split(4, 4, 1).is_err());
        assert!(dicke_split(4, 1, 5).is_err());
    }

    #[test]
    fn extended_state_examples() {
        let e = build_extended(&DSState::dicke(4, 0).unwrap());
        for m in 0..5 {
            for l in 0..5 {
                let want = if m == 0 && l == 0 { 1.0 } else { 0.0 };
                assert_eq!(e.entry(m, l), want);
            }
        }
        let u = make_ds(4, &[1.0; 5]).unwrap();
        let e = build_extended(&u);
        assert!(crate::linalg::is_psd(&e.to_matrix(), 1e-12).unwrap());
        for m in 0..5 {
            for l in 0..5 {
                if (m + l) % 2 == 1 {
                    assert_eq!(e.entry(m, l), 0.0);
                }
            }
        }
        let d1 = DSState::dicke(4, 1).unwrap();
        assert!(!crate::linalg::is_psd(&build_extended(&d1).to_matrix(), 1e-9).unwrap());
    }

    #[test]
    fn dephase_round_trip_and_errors() {
        let s = jc_state(3.0, 0.5).unwrap();
        assert_eq!(dephase_to_ds(&build_extended(&s).to_operator()).unwrap(), s);

        let mut entries = vec![Complex64::new(0.0, 0.0); 9];
        entries[0] = Complex64::new(0.5, 0.0);
        entries[8] = Complex64::new(0.5, 0.0);
        entries[1] = Complex64::new(0.1, 0.2);
        entries[3] = Complex64::new(0.1, 0.2); // should be the conjugate
        let op = DickeOperator::new(2, entries.clone()).unwrap();
        assert!(matches!(dephase_to_ds(&op), Err(Error::NotHermitian(_))));
        entries[3] = Complex64::new(0.1, -0.2);
        entries[0] = Complex64::new(0.7, 0.0);
        let op = DickeOperator::new(2, entries).unwrap();
        assert!(matches!(dephase_to_ds(&op), Err(Error::TraceMismatch(_))));
    }

    #[test]
    fn serialization_forms() {
        let s = make_ds(4, &[0.1, 0.2, 0.3, 0.2, 0.2]).unwrap();
        let back = DSState::from_json(&s.to_json()).unwrap();
        assert_eq!(back.p(), s.p());
        let c = DSState::from_csv_line("4, 1,1,1,1,1").unwrap();
        assert!(close(c.p()[2], 0.2, 1e-15));
        assert_eq!(DSState::parse(&s.to_csv_line()).unwrap().p(), s.p());
        assert!(DSState::from_json(r#"{"n":4,"p":[1,2]}"#).is_err());
        match DSState::from_csv_line("4,1,x,1,1,1") {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "field 3"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(3, 5), 0.0);
    }
}
