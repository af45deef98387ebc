//! Seeded random DS states for property checks and the self-test.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::ds_state::{binomial, make_ds, DSState};
use crate::error::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the probability simplex.
pub fn dirichlet_state<R: Rng>(n: usize, rng: &mut R) -> Result<DSState> {
    let w: Vec<f64> = (0..=n).map(|_| Exp1.sample(rng)).collect();
    make_ds(n, &w)
}

/// Dicke-basis diagonal of `(cos χ |0⟩ + sin χ |1⟩)^{⊗n}`, with
/// `x = sin²χ`: a binomial distribution.
pub fn product_weights(n: usize, x: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| binomial(n, k) * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32))
        .collect()
}

pub fn product_state<R: Rng>(n: usize, rng: &mut R) -> Result<DSState> {
    make_ds(n, &product_weights(n, rng.gen::<f64>()))
}

/// Convex mixture of a few dephased product states; separable.
pub fn separable_state<R: Rng>(n: usize, rng: &mut R) -> Result<DSState> {
    let parts = rng.gen_range(1..=4);
    let mut w = vec![0.0; n + 1];
    for _ in 0..parts {
        let lam: f64 = Exp1.sample(rng);
        for (acc, v) in w.iter_mut().zip(product_weights(n, rng.gen::<f64>())) {
            *acc += lam * v;
        }
    }
    make_ds(n, &w)
}

/// Draws alternately from the simplex, from separable mixtures, and from
/// separable mixtures shifted towards a random Dicke state, so that both
/// sides of the PPT boundary are well populated. Needs `n >= 2`.
pub fn mixed_state<R: Rng>(n: usize, rng: &mut R) -> Result<DSState> {
    match rng.gen_range(0..3) {
        0 => dirichlet_state(n, rng),
        1 => separable_state(n, rng),
        _ => {
            let sep = separable_state(n, rng)?;
            let dicke = DSState::dicke(n, rng.gen_range(1..n))?;
            sep.mix(&dicke, 1.0 - 0.5 * rng.gen::<f64>())
        }
    }
}

/// Random full-rank state with one interior weight set to zero.
pub fn rank_deficient_state<R: Rng>(n: usize, rng: &mut R) -> Result<DSState> {
    let mut w: Vec<f64> = (0..=n).map(|_| Exp1.sample(rng)).collect();
    let k = rng.gen_range(1..n);
    w[k] = 0.0;
    make_ds(n, &w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_states() {
        let a: Vec<_> = {
            let mut r = rng(7);
            (0..5).map(|_| mixed_state(5, &mut r).unwrap()).collect()
        };
        let b: Vec<_> = {
            let mut r = rng(7);
            (0..5).map(|_| mixed_state(5, &mut r).unwrap()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn product_weights_sum_to_one() {
        let s: f64 = product_weights(6, 0.3).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_has_interior_zero() {
        let mut r = rng(1);
        for _ in 0..20 {
            let s = rank_deficient_state(4, &mut r).unwrap();
            assert!(s.p()[1..4].contains(&0.0));
        }
    }
}
