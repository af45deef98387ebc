//! Derivative-free minimization over the torus of device angles.
//!
//! A coarse periodic grid finds the basins; Nelder–Mead polishes the few
//! lowest grid minima. Everything is deterministic: ties resolve by grid
//! index.

use std::f64::consts::TAU;

/// Grid resolution and local-refinement budget for angle searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngleSearch {
    pub grid_steps: usize,
    pub refine_iters: usize,
}

impl Default for AngleSearch {
    fn default() -> Self {
        AngleSearch {
            grid_steps: 64,
            refine_iters: 500,
        }
    }
}

/// Number of distinct grid basins polished per search.
const BASINS: usize = 3;

/// Stops once every vertex is within this distance of the best one.
pub const ANGLE_XTOL: f64 = 1e-7;

/// Minimizes a 2π-periodic function of `(θ, φ)`. `grid` must fill a
/// `steps × steps` buffer with values at `(2π i / steps, 2π j / steps)`,
/// row-major in `i`; `f` evaluates arbitrary points.
pub fn minimize_torus(
    search: &AngleSearch,
    grid: impl Fn(usize, &mut [f64]),
    f: impl Fn(f64, f64) -> f64,
) -> ([f64; 2], f64) {
    let g = search.grid_steps.max(4);
    let mut vals = vec![0.0; g * g];
    grid(g, &mut vals);

    // local minima of the periodic grid, lowest first
    let mut cands: Vec<(f64, usize)> = Vec::new();
    for i in 0..g {
        for j in 0..g {
            let v = vals[i * g + j];
            let mut is_min = true;
            'nb: for di in [g - 1, 0, 1] {
                for dj in [g - 1, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let w = vals[((i + di) % g) * g + (j + dj) % g];
                    if w < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                cands.push((v, i * g + j));
            }
        }
    }
    if cands.is_empty() {
        // unreachable for finite input; fall back to the global grid minimum
        let (idx, v) =
            vals.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
            );
        cands.push((v, idx));
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let h = TAU / g as f64;
    let mut best = ([0.0, 0.0], f64::INFINITY);
    for &(v, idx) in cands.iter().take(BASINS) {
        let start = [h * (idx / g) as f64, h * (idx % g) as f64];
        let (x, fx) = nelder_mead(
            |x| f(x[0], x[1]),
            start,
            0.5 * h,
            search.refine_iters,
            ANGLE_XTOL,
        );
        let (x, fx) = if fx <= v { (x, fx) } else { (start, v) };
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Plain Nelder–Mead with the standard coefficients (1, 2, ½, ½).
pub fn nelder_mead<const N: usize>(
    f: impl Fn(&[f64; N]) -> f64,
    x0: [f64; N],
    step: f64,
    max_iter: usize,
    xtol: f64,
) -> ([f64; N], f64) {
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((x0, f(&x0)));
    for i in 0..N {
        let mut x = x0;
        x[i] += step;
        simplex.push((x, f(&x)));
    }
    let order = |s: &mut Vec<([f64; N], f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));

    for _ in 0..max_iter {
        order(&mut simplex);
        let spread = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread < xtol {
            break;
        }
        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += x[k] / N as f64;
            }
        }
        let worst = simplex[N];
        let along = |t: f64| {
            let mut y = [0.0; N];
            for k in 0..N {
                y[k] = centroid[k] + t * (worst.0[k] - centroid[k]);
            }
            y
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let x = along(-0.5);
                (x, f(&x))
            } else {
                let x = along(0.5);
                (x, f(&x))
            };
            if fc < worst.1.min(fr) {
                simplex[N] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    for (x, b) in v.0.iter_mut().zip(best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }
    order(&mut simplex);
    simplex[0]
}
