//! Deterministic sampling of on-shell ADHM data.
//!
//! Construction: pick a diagonal `A` with well-separated eigenvalues (so
//! `[A,B]` has zero diagonal for every `B`), pick `i` and the second row of
//! `j` at random, solve the first row of `j` so that `i j + tau I` has zero
//! diagonal, then divide the off-diagonal entries by the eigenvalue gaps to
//! get `B`.  A mild random gauge conjugation de-specializes the result while
//! keeping it exactly on-shell up to round-off.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::linalg::Mat;
use crate::rep::AdhmData;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rand_c(rng: &mut ChaCha12Rng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// A reproducible on-shell datum at level `tau` with moment residual at the
/// level of round-off (~1e-13 for the sizes in use).
pub fn sample_on_shell(seed: u64, k: usize, tau: Complex64) -> AdhmData<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(k as u64));
    // distinct eigenvalues on a jittered circle
    let lambda: Vec<Complex64> = (0..k)
        .map(|p| {
            let theta = 2.0 * std::f64::consts::PI * (p as f64) / (k as f64);
            let r = 1.0 + 0.3 * rng.gen_range(-1.0..1.0);
            c(r * theta.cos(), r * theta.sin()) + rand_c(&mut rng) * c(0.1, 0.0)
        })
        .collect();
    let a = Mat::diag(&lambda);

    let mut i = Mat::from_fn(k, 2, |_, _| rand_c(&mut rng));
    // keep the first column away from zero so the diagonal solve is stable
    for p in 0..k {
        if i[(p, 0)].norm() < 0.3 {
            i[(p, 0)] = i[(p, 0)] + c(1.0, 0.0);
        }
    }
    let mut j = Mat::zeros(2, k);
    for p in 0..k {
        j[(1, p)] = rand_c(&mut rng);
        // (i j)_pp = -tau
        j[(0, p)] = (-tau - i[(p, 1)] * j[(1, p)]) / i[(p, 0)];
    }

    // B: off-diagonal from the eigenvalue gaps, free diagonal
    let rhs = i.mul(&j); // need [A,B]_pq = (i j + tau I)_pq for p != q
    let mut b = Mat::zeros(k, k);
    for p in 0..k {
        b[(p, p)] = rand_c(&mut rng);
        for q in 0..k {
            if p != q {
                b[(p, q)] = rhs[(p, q)] / (lambda[p] - lambda[q]);
            }
        }
    }

    let d = AdhmData { k, a, b, i, j, tau };
    // mild gauge move off the diagonal frame
    let g = Mat::from_fn(k, k, |p, q| {
        if p == q {
            c(1.0, 0.0) + rand_c(&mut rng) * c(0.2, 0.0)
        } else {
            rand_c(&mut rng) * c(0.2, 0.0)
        }
    });
    crate::rep::gauge_act(&g, &d).unwrap_or(d)
}

/// A random (generally off-shell) datum, for exercising error paths and
/// finite-difference checks.
pub fn sample_raw(seed: u64, k: usize, tau: Complex64) -> AdhmData<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xD1B54A32D192ED03);
    AdhmData {
        k,
        a: Mat::from_fn(k, k, |_, _| rand_c(&mut rng)),
        b: Mat::from_fn(k, k, |_, _| rand_c(&mut rng)),
        i: Mat::from_fn(k, 2, |_, _| rand_c(&mut rng)),
        j: Mat::from_fn(2, k, |_, _| rand_c(&mut rng)),
        tau,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::residual_norm;

    #[test]
    fn samples_are_on_shell_and_deterministic() {
        for k in 1..=5 {
            for seed in [0u64, 1, 42] {
                let d = sample_on_shell(seed, k, c(1.0, 0.25));
                let r = residual_norm(&d).unwrap();
                assert!(r < 1e-10, "k={k} seed={seed} residual {r}");
                let d2 = sample_on_shell(seed, k, c(1.0, 0.25));
                assert_eq!(d, d2);
            }
        }
    }

    #[test]
    fn different_seeds_differ() {
        let d1 = sample_on_shell(1, 3, c(1.0, 0.0));
        let d2 = sample_on_shell(2, 3, c(1.0, 0.0));
        assert!(d1.a.sub(&d2.a).max_abs() > 1e-6);
    }
}
