//! Cross-checks runnable from the command line: fast paths against the
//! dense oracle and against closed forms, at reduced sample counts.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::Rng;

use crate::bell::{
    bell_params, classical_bound, classify_nonlocal_with, closed_form_n4, optimize_angles, q_dicke,
    DeviceAngles, Objective,
};
use crate::ds_state::{build_extended, canonical_weights, dephase_to_ds, make_ds};
use crate::error::Result;
use crate::linalg::is_psd;
use crate::optimize::AngleSearch;
use crate::oracle::{dense_bell, dense_dicke, dense_ppt};
use crate::sampling::{mixed_state, product_weights, rank_deficient_state, rng};
use crate::separability::{classify_with, hankel_blocks, ppt_at, ClassifyOptions, Verdict};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

/// Random mask with `t` of the low `n` bits set.
pub fn random_subset<R: Rng>(n: usize, t: usize, rng: &mut R) -> usize {
    sample(rng, n, t).iter().fold(0, |m, i| m | (1 << i))
}

fn suite(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> SuiteResult {
    let start = Instant::now();
    let (passed, detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    SuiteResult {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn oracle_agreement(opts: &ClassifyOptions, max_n: usize, per_n: usize) -> Result<(bool, String)> {
    let mut r = rng(11);
    let (mut checked, mut bad) = (0, 0);
    for n in 4..=max_n {
        for _ in 0..per_n {
            let s = mixed_state(n, &mut r)?;
            for t in 1..=n / 2 {
                let fast = ppt_at(&s, t, opts.psd_tol, opts.convention)?;
                let slow = dense_ppt(&s, random_subset(n, t, &mut r), opts.psd_tol)?;
                checked += 1;
                bad += usize::from(fast != slow);
            }
        }
    }
    Ok((
        bad == 0,
        format!("{bad} of {checked} partition verdicts disagree"),
    ))
}

fn closed_form_agreement(samples: usize) -> Result<(bool, String)> {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let a = DeviceAngles::new(TAU * r.gen::<f64>(), TAU * r.gen::<f64>())?;
        for k in 1..=3 {
            let diff = (q_dicke(4, k, &bell_params(4, k)?, &a)? - closed_form_n4(k, &a)?).abs();
            worst = worst.max(diff);
        }
    }
    Ok((
        worst < 1e-9,
        format!("max deviation {worst:.2e} over {samples} angle pairs"),
    ))
}

fn dense_bell_agreement(max_n: usize, samples: usize) -> Result<(bool, String)> {
    let mut r = rng(13);
    let mut worst = 0.0f64;
    for n in 2..=max_n {
        for _ in 0..samples {
            let a = DeviceAngles::new(TAU * r.gen::<f64>(), TAU * r.gen::<f64>())?;
            let k_ref = r.gen_range(0..=n);
            let p = bell_params(n, k_ref)?;
            let b = dense_bell(n, &p, &a)?;
            for k in 0..=n {
                let d = (b.expectation(&dense_dicke(n, k)?) - q_dicke(n, k, &p, &a)?).abs();
                worst = worst.max(d);
            }
        }
    }
    Ok((worst < 1e-9, format!("max deviation {worst:.2e}")))
}

fn extended_state(opts: &ClassifyOptions, per_n: usize) -> Result<(bool, String)> {
    let mut r = rng(14);
    let mut bad = 0;
    for n in 4..=8 {
        for _ in 0..per_n {
            let s = mixed_state(n, &mut r)?;
            let ext = build_extended(&s);
            let lhs = is_psd(&ext.to_matrix(), opts.psd_tol)?;
            let mut rhs = true;
            for b in hankel_blocks(&canonical_weights(&s), n / 2)? {
                rhs &= is_psd(&b.to_matrix(), opts.psd_tol)?;
            }
            let round_trip = dephase_to_ds(&ext.to_operator())? == s;
            bad += usize::from(lhs != rhs || !round_trip);
        }
    }
    Ok((
        bad == 0,
        format!("{bad} mismatches over {} states", 5 * per_n),
    ))
}

fn rank_deficient(opts: &ClassifyOptions, samples: usize) -> Result<(bool, String)> {
    let mut r = rng(15);
    let mut bad = 0;
    for i in 0..samples {
        let s = rank_deficient_state(4 + i % 3, &mut r)?;
        bad += usize::from(classify_with(&s, opts)?.verdict != Verdict::Entangled);
    }
    Ok((
        bad == 0,
        format!("{bad} of {samples} not classified entangled"),
    ))
}

fn nesting(opts: &ClassifyOptions, samples: usize) -> Result<(bool, String)> {
    let mut r = rng(16);
    let mut bad = 0;
    for i in 0..samples {
        let n = 4 + i % 5;
        let s = mixed_state(n, &mut r)?;
        let report = classify_with(&s, opts)?;
        let flags: Vec<bool> = report.ppt_by_partition.values().copied().collect();
        bad += usize::from(flags.windows(2).any(|w| w[1] && !w[0]));
    }
    Ok((
        bad == 0,
        format!("{bad} of {samples} states PPT at a larger cut but not a smaller one"),
    ))
}

fn local_bound(samples: usize, search: &AngleSearch) -> Result<(bool, String)> {
    let mut r = rng(17);
    let mut margin = f64::INFINITY;
    let mut flagged = 0;
    for i in 0..samples {
        let n = 2 + i % 5;
        let s = make_ds(n, &product_weights(n, r.gen()))?;
        let v = classify_nonlocal_with(&s, 1e-9, search)?;
        margin = margin.min(v.q_value - classical_bound(&v.params));
        flagged += usize::from(v.violated);
    }
    Ok((
        flagged == 0,
        format!("{flagged} of {samples} product states flagged, smallest margin {margin:.3e}"),
    ))
}

fn common_orientation(search: &AngleSearch) -> Result<(bool, String)> {
    let (a, _) = optimize_angles(&Objective::CommonDicke { n: 4 }, search)?;
    let q2 = q_dicke(4, 2, &bell_params(4, 2)?, &a)?;
    let q1 = q_dicke(4, 1, &bell_params(4, 1)?, &a)?;
    let ok = (q2 + 2.913).abs() < 5e-3 && (q1 + 0.683).abs() < 5e-3;
    Ok((
        ok,
        format!(
            "(θ, φ) = ({:.4}, {:.4}), Q(D2) = {q2:.4}, Q(D1) = {q1:.4}",
            a.theta(),
            a.phi()
        ),
    ))
}

/// Runs every suite. `opts.convention` selects the Hankel filling, so the
/// literal-`p` variant can be checked against the oracle too.
pub fn run(quick: bool, opts: &ClassifyOptions) -> Vec<SuiteResult> {
    let search = AngleSearch::default();
    let (per_n, max_n, samples) = if quick { (40, 6, 200) } else { (200, 8, 1000) };
    vec![
        suite("dense-oracle PPT agreement", || {
            oracle_agreement(opts, max_n, per_n)
        }),
        suite("closed-form Bell agreement", || {
            closed_form_agreement(10 * samples)
        }),
        suite("dense Bell operator agreement", || {
            dense_bell_agreement(if quick { 5 } else { 6 }, 10)
        }),
        suite("extended-state equivalence", || extended_state(opts, per_n)),
        suite("rank-deficient states entangled", || {
            rank_deficient(opts, samples)
        }),
        suite("PPT nesting across cuts", || nesting(opts, samples)),
        suite("local bound on product states", || {
            local_bound(samples / 4, &search)
        }),
        suite("common Dicke orientation", || common_orientation(&search)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separability::Convention;

    #[test]
    fn subset_masks_have_t_bits() {
        let mut r = rng(1);
        for t in 0..=6 {
            let m = random_subset(6, t, &mut r);
            assert_eq!(m.count_ones() as usize, t);
            assert!(m < 64);
        }
    }

    #[test]
    fn literal_p_fails_the_oracle_suite() {
        let opts = ClassifyOptions {
            convention: Convention::LiteralP,
            ..ClassifyOptions::default()
        };
        let (ok, _) = oracle_agreement(&opts, 5, 30).unwrap();
        assert!(!ok);
        let (ok, _) = oracle_agreement(&ClassifyOptions::default(), 5, 30).unwrap();
        assert!(ok);
    }
}
