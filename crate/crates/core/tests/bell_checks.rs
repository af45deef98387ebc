use std::f64::consts::TAU;

use dicke_ppt::bell::{
    bell_params, classical_bound, classify_nonlocal, closed_form_n4, optimize_angles, q_dicke,
    q_ds, DeviceAngles, Objective,
};
use dicke_ppt::ds_state::make_ds;
use dicke_ppt::optimize::AngleSearch;
use dicke_ppt::oracle::{dense_bell, dense_dicke, dense_ds};
use dicke_ppt::sampling::{product_weights, rng};
use dicke_ppt::DSState;
use rand::Rng;

fn random_angles(r: &mut impl Rng) -> DeviceAngles {
    DeviceAngles::new(TAU * r.gen::<f64>(), TAU * r.gen::<f64>()).unwrap()
}

#[test]
fn correlator_form_matches_dense_operator() {
    let mut r = rng(31);
    for n in 4..=6 {
        for _ in 0..100 {
            let a = random_angles(&mut r);
            let params = bell_params(n, r.gen_range(0..=n)).unwrap();
            let b = dense_bell(n, &params, &a).unwrap();
            for k in 0..=n {
                let dense = b.expectation(&dense_dicke(n, k).unwrap());
                let fast = q_dicke(n, k, &params, &a).unwrap();
                assert!(
                    (dense - fast).abs() < 1e-9,
                    "n={n} k={k}: {dense} vs {fast}"
                );
            }
        }
    }
}

#[test]
fn mixture_value_is_trace_with_dense_state() {
    let mut r = rng(32);
    let s = make_ds(4, &[0.1, 0.25, 0.3, 0.25, 0.1]).unwrap();
    let rho = dense_ds(&s).unwrap();
    for _ in 0..10 {
        let a = random_angles(&mut r);
        let params = bell_params(4, r.gen_range(0..=4)).unwrap();
        let b = dense_bell(4, &params, &a).unwrap();
        let mut tr = 0.0;
        for i in 0..16 {
            for j in 0..16 {
                tr += rho.get(i, j) * b.get(j, i);
            }
        }
        assert!((tr - q_ds(&s, &params, &a).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn printed_polynomials_match_correlator_form() {
    let mut r = rng(33);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let a = random_angles(&mut r);
        for k in 1..=3 {
            let d = q_dicke(4, k, &bell_params(4, k).unwrap(), &a).unwrap()
                - closed_form_n4(k, &a).unwrap();
            worst = worst.max(d.abs());
        }
    }
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn product_state_value_at_reported_angles() {
    let a = DeviceAngles::new(3.916, 3.002).unwrap();
    let params = bell_params(4, 2).unwrap();
    let b = dense_bell(4, &params, &a).unwrap();
    let dense = b.expectation(&dense_dicke(4, 0).unwrap());
    let fast = q_ds(&DSState::dicke(4, 0).unwrap(), &params, &a).unwrap();
    assert!((dense - fast).abs() < 1e-9);
    assert!(fast > 0.0);
    let uniform = make_ds(4, &[1.0; 5]).unwrap();
    let mean: f64 = (0..=4)
        .map(|k| q_dicke(4, k, &params, &a).unwrap())
        .sum::<f64>()
        / 5.0;
    assert!((q_ds(&uniform, &params, &a).unwrap() - mean).abs() < 1e-12);
}

#[test]
fn dicke_pair_reaches_the_reported_optimum_together() {
    let (a, worst) =
        optimize_angles(&Objective::CommonDicke { n: 4 }, &AngleSearch::default()).unwrap();
    assert!(
        a.distance(3.916, 3.002) < 0.02 || a.distance(TAU - 3.916, TAU - 3.002) < 0.02,
        "{a:?}"
    );
    assert!((worst + 0.683).abs() < 5e-3);
    let q2 = q_dicke(4, 2, &bell_params(4, 2).unwrap(), &a).unwrap();
    assert!((q2 + 2.913).abs() < 5e-3);
}

#[test]
fn balanced_dicke_state_alone_goes_lower() {
    // on its own operator |D_2^4⟩ can be pushed below the jointly optimal value
    let (a, q) = optimize_angles(
        &Objective::Dicke {
            n: 4,
            k: 2,
            params: bell_params(4, 2).unwrap(),
        },
        &AngleSearch::default(),
    )
    .unwrap();
    assert!((q + 3.5274).abs() < 1e-3, "{q}");
    let dense = dense_bell(4, &bell_params(4, 2).unwrap(), &a)
        .unwrap()
        .expectation(&dense_dicke(4, 2).unwrap());
    assert!((dense - q).abs() < 1e-9);
    let (_, q1) = optimize_angles(
        &Objective::Dicke {
            n: 4,
            k: 1,
            params: bell_params(4, 1).unwrap(),
        },
        &AngleSearch::default(),
    )
    .unwrap();
    assert!((q1 + 0.683).abs() < 5e-3, "{q1}");
}

#[test]
fn product_states_never_violate() {
    let mut r = rng(34);
    for i in 0..200 {
        let n = 2 + i % 7;
        let s = make_ds(n, &product_weights(n, r.gen())).unwrap();
        let v = classify_nonlocal(&s, 1e-9).unwrap();
        let bound = classical_bound(&v.params);
        assert!(
            v.q_value >= bound - 1e-9,
            "n={n} p={:?} q={}",
            s.p(),
            v.q_value
        );
        assert!(!v.violated);
    }
}

#[test]
fn odd_n_search_covers_every_operator() {
    // the lowest value for |D_3^5⟩ may come from an operator with k_ref > n/2
    let s = DSState::dicke(5, 3).unwrap();
    let v = classify_nonlocal(&s, 1e-9).unwrap();
    let mut best = f64::INFINITY;
    for k in 0..=5 {
        let (_, q) = optimize_angles(
            &Objective::Mixture {
                state: &s,
                params: bell_params(5, k).unwrap(),
            },
            &AngleSearch::default(),
        )
        .unwrap();
        best = best.min(q);
    }
    assert!((v.q_value - best).abs() < 1e-9);
    assert_eq!(
        v.violated,
        v.q_value < classical_bound(&v.params) - 1e-9,
        "{}",
        v.q_value
    );
}

#[test]
fn classical_bound_matches_per_party_enumeration() {
    // brute force over every assignment of (a_0, a_1) to each party
    for n in 2..=7 {
        for k in 0..=n {
            let p = bell_params(n, k).unwrap();
            let mut lowest = f64::INFINITY;
            for code in 0..1usize << (2 * n) {
                let a: Vec<[f64; 2]> = (0..n)
                    .map(|i| {
                        let bits = code >> (2 * i);
                        [
                            if bits & 1 == 1 { -1.0 } else { 1.0 },
                            if bits & 2 == 2 { -1.0 } else { 1.0 },
                        ]
                    })
                    .collect();
                let mut b = p.beta_c;
                for i in 0..n {
                    b += p.alpha * a[i][0] + p.beta * a[i][1];
                    for j in 0..n {
                        if i != j {
                            b += 0.5 * p.gamma * a[i][0] * a[j][0]
                                + p.delta * a[i][0] * a[j][1]
                                + 0.5 * p.epsilon * a[i][1] * a[j][1];
                        }
                    }
                }
                lowest = lowest.min(b);
            }
            assert!(
                (lowest - classical_bound(&p)).abs() < 1e-9,
                "n={n} k={k}: {lowest}"
            );
        }
    }
}
