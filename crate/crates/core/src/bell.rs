//! Two-body permutationally invariant Bell inequality evaluated on Dicke
//! states and their mixtures.
//!
//! Each party measures `M_0 = cos φ σ_z + sin φ σ_x` or
//! `M_1 = cos θ σ_z + sin θ σ_x`, and
//!
//! ```text
//! B(θ, φ) = α S_0 + β S_1 + (γ/2) S_00 + δ S_01 + (ε/2) S_11 + β_C ≥ 0
//! ```
//!
//! holds for every local model. On a Dicke state only `⟨σ_z⟩`, `⟨σ_z σ_z⟩`
//! and `⟨σ_x σ_x⟩` survive, so the expectation is a low-order trigonometric
//! polynomial in the two angles.

use std::f64::consts::TAU;

use serde::{Serialize, Serializer};

use crate::ds_state::{binomial, DSState};
use crate::error::{Error, Result};
use crate::optimize::{minimize_torus, AngleSearch};
use crate::separability::{ppt_at, Convention};

pub const DEFAULT_BELL_TOL: f64 = 1e-9;

/// Coefficients of the inequality tuned to violate `|D_{k_ref}^n⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellParams {
    pub n: usize,
    pub k_ref: usize,
    pub nu: i64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub beta_c: f64,
}

pub fn bell_params(n: usize, k_ref: usize) -> Result<BellParams> {
    if n < 2 || k_ref > n {
        return Err(Error::OutOfRange {
            what: "Bell parameters",
            detail: format!("need n >= 2 and 0 <= k_ref <= n, got n = {n}, k_ref = {k_ref}"),
        });
    }
    let nf = n as f64;
    let nu = (n / 2) as i64 - k_ref as i64;
    let alpha = 2.0 * nu as f64 * nf * (nf - 1.0);
    Ok(BellParams {
        n,
        k_ref,
        nu,
        alpha,
        beta: alpha / nf,
        gamma: nf * (nf - 1.0),
        delta: nf,
        epsilon: -2.0,
        beta_c: binomial(n, 2) * (nf + 2.0 * (2.0 * (nu * nu) as f64 + 1.0)),
    })
}

/// Exact minimum of `B` over deterministic local strategies.
///
/// Every party fixes outcomes `(a_0, a_1) ∈ {±1}²`; the value depends only
/// on how many parties use each of the four assignments. Zero for every
/// even `n`; for odd `n` the family sits `C(n, 2)` below zero.
pub fn classical_bound(params: &BellParams) -> f64 {
    let n = params.n as i64;
    let mut best = f64::INFINITY;
    for pp in 0..=n {
        for pm in 0..=n - pp {
            for mp in 0..=n - pp - pm {
                let mm = n - pp - pm - mp;
                let s0 = (pp + pm - mp - mm) as f64;
                let s1 = (pp - pm + mp - mm) as f64;
                let same_site = (pp - pm - mp + mm) as f64;
                let nf = n as f64;
                let b = params.alpha * s0
                    + params.beta * s1
                    + 0.5 * params.gamma * (s0 * s0 - nf)
                    + params.delta * (s0 * s1 - same_site)
                    + 0.5 * params.epsilon * (s1 * s1 - nf)
                    + params.beta_c;
                best = best.min(b);
            }
        }
    }
    best
}

/// Measurement orientations, kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceAngles {
    theta: f64,
    phi: f64,
}

impl DeviceAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidParams("device angles must be finite".into()));
        }
        Ok(DeviceAngles {
            theta: theta.rem_euclid(TAU),
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Distance on the torus.
    pub fn distance(&self, theta: f64, phi: f64) -> f64 {
        let wrap = |x: f64| {
            let r = x.rem_euclid(TAU);
            r.min(TAU - r)
        };
        wrap(self.theta - theta).hypot(wrap(self.phi - phi))
    }
}

/// Single-site and two-site correlators of a permutation-symmetric state.
/// `⟨σ_x⟩` and `⟨σ_z σ_x⟩` vanish on Dicke mixtures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorSet {
    pub mz: f64,
    pub czz: f64,
    pub cxx: f64,
}

impl CorrelatorSet {
    /// Weighted average, valid because the Bell expectation is linear.
    pub fn mixture(s: &DSState) -> Result<CorrelatorSet> {
        let n = s.n();
        let mut acc = CorrelatorSet {
            mz: 0.0,
            czz: 0.0,
            cxx: 0.0,
        };
        for (k, &pk) in s.p().iter().enumerate() {
            if pk == 0.0 {
                continue;
            }
            let c = dicke_correlators(n, k)?;
            acc.mz += pk * c.mz;
            acc.czz += pk * c.czz;
            acc.cxx += pk * c.cxx;
        }
        Ok(acc)
    }
}

/// Closed-form correlators of `|D_k^n⟩` (σ_z |0⟩ = |0⟩).
pub fn dicke_correlators(n: usize, k: usize) -> Result<CorrelatorSet> {
    if n < 2 || k > n {
        return Err(Error::OutOfRange {
            what: "Dicke index",
            detail: format!("need n >= 2 and k <= n, got n = {n}, k = {k}"),
        });
    }
    let (nf, kf) = (n as f64, k as f64);
    let m = nf - 2.0 * kf;
    Ok(CorrelatorSet {
        mz: m / nf,
        czz: (m * m - nf) / (nf * (nf - 1.0)),
        cxx: 2.0 * kf * (nf - kf) / (nf * (nf - 1.0)),
    })
}

/// `Q(θ, φ) = c0 + a_φ cos φ + a_θ cos θ + b_φ cos²φ + s_φ sin²φ
///          + x_c cos θ cos φ + x_s sin θ sin φ + b_θ cos²θ + s_θ sin²θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellPolynomial {
    c0: f64,
    a_phi: f64,
    a_theta: f64,
    b_phi: f64,
    s_phi: f64,
    x_c: f64,
    x_s: f64,
    b_theta: f64,
    s_theta: f64,
}

impl BellPolynomial {
    pub fn new(params: &BellParams, corr: &CorrelatorSet) -> Self {
        let nf = params.n as f64;
        let pairs = nf * (nf - 1.0);
        BellPolynomial {
            c0: params.beta_c,
            a_phi: params.alpha * nf * corr.mz,
            a_theta: params.beta * nf * corr.mz,
            b_phi: 0.5 * params.gamma * pairs * corr.czz,
            s_phi: 0.5 * params.gamma * pairs * corr.cxx,
            x_c: params.delta * pairs * corr.czz,
            x_s: params.delta * pairs * corr.cxx,
            b_theta: 0.5 * params.epsilon * pairs * corr.czz,
            s_theta: 0.5 * params.epsilon * pairs * corr.cxx,
        }
    }

    #[inline]
    fn eval_trig(&self, (ct, st): (f64, f64), (cp, sp): (f64, f64)) -> f64 {
        self.phi_part(cp, sp) + self.theta_part(ct, st) + self.x_c * ct * cp + self.x_s * st * sp
    }

    #[inline]
    fn phi_part(&self, cp: f64, sp: f64) -> f64 {
        self.c0 + self.a_phi * cp + self.b_phi * cp * cp + self.s_phi * sp * sp
    }

    #[inline]
    fn theta_part(&self, ct: f64, st: f64) -> f64 {
        self.a_theta * ct + self.b_theta * ct * ct + self.s_theta * st * st
    }

    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        self.eval_trig(theta.sin_cos().rev(), phi.sin_cos().rev())
    }
}

trait Rev {
    fn rev(self) -> Self;
}

impl Rev for (f64, f64) {
    fn rev(self) -> Self {
        (self.1, self.0)
    }
}

fn check_n(params: &BellParams, n: usize) -> Result<()> {
    if params.n != n {
        return Err(Error::DimensionMismatch {
            expected: params.n + 1,
            actual: n + 1,
        });
    }
    Ok(())
}

/// `⟨D_k^n| B(θ, φ) |D_k^n⟩`.
pub fn q_dicke(n: usize, k: usize, params: &BellParams, angles: &DeviceAngles) -> Result<f64> {
    check_n(params, n)?;
    let c = dicke_correlators(n, k)?;
    Ok(BellPolynomial::new(params, &c).eval(angles.theta, angles.phi))
}

/// `Σ_k p_k Q(|D_k⟩)`.
pub fn q_ds(s: &DSState, params: &BellParams, angles: &DeviceAngles) -> Result<f64> {
    check_n(params, s.n())?;
    let c = CorrelatorSet::mixture(s)?;
    Ok(BellPolynomial::new(params, &c).eval(angles.theta, angles.phi))
}

/// The printed four-qubit expressions: `k = 1, 3` share one polynomial, `k = 2`
/// has its own. Each assumes the operator tuned to that `k`.
pub fn closed_form_n4(k: usize, angles: &DeviceAngles) -> Result<f64> {
    let (ct, st) = (angles.theta.cos(), angles.theta.sin());
    let (cp, sp) = (angles.phi.cos(), angles.phi.sin());
    match k {
        1 | 3 => Ok(
            75.0 + 12.0 * ct + 3.0 * ct * ct + 48.0 * cp - 18.0 * cp * cp - 3.0 * st * st
                + 24.0 * st * sp
                + 18.0 * sp * sp,
        ),
        2 => Ok(
            46.0 + 6.0 * ct * ct - 16.0 * ct * cp - 36.0 * cp * cp - 6.0 * st * st
                + 32.0 * st * sp
                + 36.0 * sp * sp,
        ),
        _ => Err(Error::OutOfRange {
            what: "closed-form Dicke index",
            detail: format!("k = {k} not in {{1, 2, 3}}"),
        }),
    }
}

/// What to minimize over the device angles.
#[derive(Debug, Clone)]
pub enum Objective<'a> {
    /// One Dicke state under one operator.
    Dicke {
        n: usize,
        k: usize,
        params: BellParams,
    },
    /// A DS mixture under one operator.
    Mixture {
        state: &'a DSState,
        params: BellParams,
    },
    /// Common orientation for all entangled Dicke states `0 < k < n`, each
    /// scored by its own tuned operator: minimizes the largest of their
    /// values, i.e. the weakest violation.
    CommonDicke { n: usize },
}

impl Objective<'_> {
    fn polynomials(&self) -> Result<Vec<BellPolynomial>> {
        match self {
            Objective::Dicke { n, k, params } => {
                check_n(params, *n)?;
                Ok(vec![BellPolynomial::new(
                    params,
                    &dicke_correlators(*n, *k)?,
                )])
            }
            Objective::Mixture { state, params } => {
                check_n(params, state.n())?;
                Ok(vec![BellPolynomial::new(
                    params,
                    &CorrelatorSet::mixture(state)?,
                )])
            }
            Objective::CommonDicke { n } => {
                if *n < 2 {
                    return Err(Error::OutOfRange {
                        what: "qubit count",
                        detail: "common orientation needs n >= 2".into(),
                    });
                }
                (1..*n)
                    .map(|k| {
                        Ok(BellPolynomial::new(
                            &bell_params(*n, k)?,
                            &dicke_correlators(*n, k)?,
                        ))
                    })
                    .collect()
            }
        }
    }
}

/// Grid search plus local refinement. Returns the minimizing angles and the
/// objective value there.
pub fn optimize_angles(objective: &Objective, search: &AngleSearch) -> Result<(DeviceAngles, f64)> {
    if search.grid_steps < 16 {
        return Err(Error::OutOfRange {
            what: "grid steps",
            detail: format!("{} < 16", search.grid_steps),
        });
    }
    let polys = objective.polynomials()?;
    Ok(minimize_polynomials(&polys, search))
}

/// Minimizes `max_i polys[i](θ, φ)`.
fn minimize_polynomials(polys: &[BellPolynomial], search: &AngleSearch) -> (DeviceAngles, f64) {
    let grid = |g: usize, out: &mut [f64]| {
        let trig: Vec<(f64, f64)> = (0..g)
            .map(|i| {
                let (s, c) = (TAU * i as f64 / g as f64).sin_cos();
                (c, s)
            })
            .collect();
        out.fill(f64::NEG_INFINITY);
        for poly in polys {
            let phi_part: Vec<f64> = trig.iter().map(|&(c, s)| poly.phi_part(c, s)).collect();
            for (i, &(ct, st)) in trig.iter().enumerate() {
                let th = poly.theta_part(ct, st);
                let (xc, xs) = (poly.x_c * ct, poly.x_s * st);
                let row = &mut out[i * g..(i + 1) * g];
                for (j, &(cp, sp)) in trig.iter().enumerate() {
                    let v = phi_part[j] + th + xc * cp + xs * sp;
                    if v > row[j] {
                        row[j] = v;
                    }
                }
            }
        }
    };
    let f = |t: f64, p: f64| {
        let (ct, st) = t.sin_cos().rev();
        let (cp, sp) = p.sin_cos().rev();
        polys
            .iter()
            .map(|q| q.eval_trig((ct, st), (cp, sp)))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (x, v) = minimize_torus(search, grid, f);
    (
        DeviceAngles {
            theta: x[0].rem_euclid(TAU),
            phi: x[1].rem_euclid(TAU),
        },
        v,
    )
}

/// Result of the nonlocality search on one state. `violated` means `q_value`
/// lies more than the tolerance below the classical bound, which is zero
/// for even `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellVerdict {
    pub q_value: f64,
    pub violated: bool,
    pub params: BellParams,
    pub angles: DeviceAngles,
}

impl Serialize for BellVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            q: f64,
            violated: bool,
            k_ref: usize,
            theta: f64,
            phi: f64,
        }
        Wire {
            q: self.q_value,
            violated: self.violated,
            k_ref: self.params.k_ref,
            theta: self.angles.theta,
            phi: self.angles.phi,
        }
        .serialize(s)
    }
}

/// Minimizes `Q(ρ)` over the tuned operators and over the angles. For even
/// `n` the operators with `k_ref > n/2` are spin flips of the others (same
/// values at `(θ + π, φ + π)`) and are skipped; for odd `n` the flip changes
/// `ν` to `-(ν + 1)`, so every `k_ref` is tried. All operators of one `n`
/// share the same classical bound, so the lowest `Q` decides.
pub fn classify_nonlocal(s: &DSState, tol: f64) -> Result<BellVerdict> {
    classify_nonlocal_with(s, tol, &AngleSearch::default())
}

pub fn classify_nonlocal_with(s: &DSState, tol: f64, search: &AngleSearch) -> Result<BellVerdict> {
    let n = s.n();
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "qubit count",
            detail: "Bell inequality needs n >= 2".into(),
        });
    }
    let corr = CorrelatorSet::mixture(s)?;
    let mut best: Option<BellVerdict> = None;
    let last = if n.is_multiple_of(2) { n / 2 } else { n };
    for k_ref in 0..=last {
        let params = bell_params(n, k_ref)?;
        let (angles, q) = minimize_polynomials(&[BellPolynomial::new(&params, &corr)], search);
        if best.is_none_or(|b| q < b.q_value) {
            best = Some(BellVerdict {
                q_value: q,
                violated: q < classical_bound(&params) - tol,
                params,
                angles,
            });
        }
    }
    Ok(best.expect("at least one operator"))
}

/// PPT across `1 | n-1` and yet violating the inequality.
pub fn peres_check(s: &DSState, psd_tol: f64, bell_tol: f64) -> Result<bool> {
    if s.n() < 2 {
        return Ok(false);
    }
    if !ppt_at(s, 1, psd_tol, Convention::Canonical)? {
        return Ok(false);
    }
    Ok(classify_nonlocal(s, bell_tol)?.violated)
}

/// Both sides of `(p_1 + p_3) Q_1 + p_2 Q_2 > (p_0 + p_4) Q_0` with
/// `Q_k = |Q(|D_k⟩)|` under the operator tuned to `k`, all at one angle pair.
///
/// Combines values of three different operators, so `lhs > rhs` is not a
/// Bell violation by itself; kept as a diagnostic for comparing with the
/// single-operator verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedMagnitude {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn mixed_magnitude_condition(s: &DSState, angles: &DeviceAngles) -> Result<MixedMagnitude> {
    if s.n() != 4 {
        return Err(Error::WrongN(s.n()));
    }
    let qk = |k: usize| -> Result<f64> { Ok(q_dicke(4, k, &bell_params(4, k)?, angles)?.abs()) };
    let p = s.p();
    Ok(MixedMagnitude {
        lhs: (p[1] + p[3]) * qk(1)? + p[2] * qk(2)?,
        rhs: (p[0] + p[4]) * qk(0)?,
    })
}
