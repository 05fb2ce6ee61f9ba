//! The hat construction: packing an ADHM datum into a pair of bordered
//! `(k+1) x (k+1)` matrices with zero corner, the induced embedding of the
//! `k`-th moduli space into the `(k+1)`-st, and the stability predicates.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{rank, Mat};
use crate::rep::{require_on_shell, AdhmData};
use crate::{Real, C};

/// Bordered pair `(Ahat, Bhat)` of size `(k+1) x (k+1)` at level `tau`;
/// `in_s` records that both `(k+1, k+1)` corners vanish exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HatPair<R: Real> {
    pub k: usize,
    pub ahat: Mat<R>,
    pub bhat: Mat<R>,
    pub tau: C<R>,
    pub in_s: bool,
}

impl<R: Real> HatPair<R> {
    /// `tauhat = diag(tau, ..., tau, -k tau)`.
    pub fn tau_hat(&self) -> Mat<R> {
        tau_hat_matrix(self.k, self.tau)
    }
}

/// The `(k+1) x (k+1)` diagonal matrix `diag(tau, ..., tau, -k tau)`.
pub fn tau_hat_matrix<R: Real>(k: usize, tau: C<R>) -> Mat<R> {
    let mut m = Mat::scalar(k + 1, tau);
    m[(k, k)] = -tau.scale(R::from_usize(k).unwrap());
    m
}

/// `Ahat = [[A, i1], [j2, 0]]`, `Bhat = [[B, i2], [-j1, 0]]`.
pub fn to_hats<R: Real>(d: &AdhmData<R>) -> Result<HatPair<R>> {
    d.check_shapes()?;
    let zero = Mat::zeros(1, 1);
    let ahat = Mat::block2x2(&d.a, &d.i_col(0), &d.j_row(1), &zero);
    let bhat = Mat::block2x2(&d.b, &d.i_col(1), &d.j_row(0).neg(), &zero);
    Ok(HatPair {
        k: d.k,
        ahat,
        bhat,
        tau: d.tau,
        in_s: true,
    })
}

/// Exact inverse of [`to_hats`]; rejects nonzero corners.
pub fn from_hats<R: Real>(h: &HatPair<R>) -> Result<AdhmData<R>> {
    let k = h.k;
    if h.ahat.rows != k + 1 || h.bhat.rows != k + 1 {
        return Err(Error::Invalid("HatPair size mismatch".into()));
    }
    if !h.ahat[(k, k)].is_zero() || !h.bhat[(k, k)].is_zero() {
        return Err(Error::Invalid(
            "from_hats requires exactly zero corner entries".into(),
        ));
    }
    let mut i = Mat::zeros(k, 2);
    i.set_block(0, 0, &h.ahat.block(0, k, k, 1));
    i.set_block(0, 1, &h.bhat.block(0, k, k, 1));
    let mut j = Mat::zeros(2, k);
    j.set_block(0, 0, &h.bhat.block(k, 0, 1, k).neg());
    j.set_block(1, 0, &h.ahat.block(k, 0, 1, k));
    Ok(AdhmData {
        k,
        a: h.ahat.block(0, 0, k, k),
        b: h.bhat.block(0, 0, k, k),
        i,
        j,
        tau: h.tau,
    })
}

/// The four blocks of `[Ahat, Bhat]`:
/// `([A,B] - i j,  A i2 - B i1,  j2 B + j1 A,  j1 i1 + j2 i2)`.
pub fn hat_commutator_blocks<R: Real>(
    d: &AdhmData<R>,
) -> Result<(Mat<R>, Mat<R>, Mat<R>, Mat<R>)> {
    d.check_shapes()?;
    let (i1, i2) = (d.i_col(0), d.i_col(1));
    let (j1, j2) = (d.j_row(0), d.j_row(1));
    let top_left = d.a.commutator(&d.b).sub(&d.i.mul(&d.j));
    let top_right = d.a.mul(&i2).sub(&d.b.mul(&i1));
    let bottom_left = j2.mul(&d.b).add(&j1.mul(&d.a));
    let corner = j1.mul(&i1).add(&j2.mul(&i2));
    Ok((top_left, top_right, bottom_left, corner))
}

/// The embedding into the next moduli space: hat the matrices and border them
/// with `ihat1 = e_{k+1}`, `ihat2 = (A i2 - B i1, -(k+1) tau)`,
/// `jhat1 = (j2 B + j1 A, 0)`, `jhat2 = e_{k+1}^T`.
pub fn embed<R: Real>(d: &AdhmData<R>, tol: R) -> Result<AdhmData<R>> {
    require_on_shell(d, tol)?;
    let k = d.k;
    let h = to_hats(d)?;
    let (_, top_right, bottom_left, _) = hat_commutator_blocks(d)?;
    let kp1 = R::from_usize(k + 1).unwrap();

    let mut i = Mat::zeros(k + 1, 2);
    i[(k, 0)] = C::<R>::new(R::one(), R::zero());
    i.set_block(0, 1, &top_right);
    i[(k, 1)] = -d.tau.scale(kp1);

    let mut j = Mat::zeros(2, k + 1);
    j.set_block(0, 0, &bottom_left);
    j[(1, k)] = C::<R>::new(R::one(), R::zero());

    Ok(AdhmData {
        k: k + 1,
        a: h.ahat,
        b: h.bhat,
        i,
        j,
        tau: d.tau,
    })
}

/// Zeroes both corner entries when they are below `tol` (relative to the
/// pair's scale), flagging the result as living in the zero-corner slice;
/// errors when a corner is genuinely nonzero.
pub fn project_to_s<R: Real>(h: &HatPair<R>, tol: R) -> Result<HatPair<R>> {
    let k = h.k;
    let scale = R::one() + h.ahat.frobenius_norm() + h.bhat.frobenius_norm();
    if h.ahat[(k, k)].norm() > tol * scale || h.bhat[(k, k)].norm() > tol * scale {
        return Err(Error::Invalid(
            "corner entries are not negligible; not in the zero-corner slice".into(),
        ));
    }
    let mut out = h.clone();
    out.ahat[(k, k)] = C::<R>::zero();
    out.bhat[(k, k)] = C::<R>::zero();
    out.in_s = true;
    Ok(out)
}

const RANK_TOL: f64 = 1e-9;

/// Smallest word length whose Krylov span under `{A, B}` starting from the
/// columns of `seed` stops growing, and the final rank.
fn krylov_rank<R: Real>(a: &Mat<R>, b: &Mat<R>, seed: &Mat<R>, max_len: usize) -> Result<usize> {
    let tol = R::from_f64(RANK_TOL).unwrap();
    let mut words: Vec<Mat<R>> = vec![seed.clone()];
    let mut span = seed.clone();
    let mut r = rank(&span, tol)?;
    for _ in 0..max_len {
        let mut next: Vec<Mat<R>> = Vec::with_capacity(words.len() * 2);
        for w in &words {
            next.push(a.mul(w));
            next.push(b.mul(w));
        }
        for m in &next {
            span = Mat::hstack(&span, m);
        }
        let r2 = rank(&span, tol)?;
        if r2 == r {
            return Ok(r);
        }
        r = r2;
        words = next;
    }
    Ok(r)
}

/// No proper `(A,B)`-invariant subspace contains the image of `i`.
pub fn is_stable<R: Real>(d: &AdhmData<R>) -> Result<bool> {
    d.check_shapes()?;
    let r = krylov_rank(&d.a, &d.b, &d.i, d.k.saturating_sub(1))?;
    Ok(r == d.k)
}

/// No nonzero `(A,B)`-invariant subspace sits inside the kernel of `j`
/// (the transpose-dual of stability).
pub fn is_costable<R: Real>(d: &AdhmData<R>) -> Result<bool> {
    d.check_shapes()?;
    let r = krylov_rank(&d.a.t(), &d.b.t(), &d.j.t(), d.k.saturating_sub(1))?;
    Ok(r == d.k)
}

pub fn is_regular<R: Real>(d: &AdhmData<R>) -> Result<bool> {
    Ok(is_stable(d)? && is_costable(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{gauge_act, moment_residual, points_equal};
    use crate::sample::sample_on_shell;
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hats_k1_pinned() {
        let d = AdhmData {
            k: 1,
            a: Mat::zeros(1, 1),
            b: Mat::zeros(1, 1),
            i: Mat::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)]]),
            j: Mat::from_rows(vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]]),
            tau: c(0.0, 0.0),
        };
        let h = to_hats(&d).unwrap();
        let expect_a = Mat::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(h.ahat.sub(&expect_a).max_abs() < 1e-15);
        assert!(h.bhat.max_abs() < 1e-15);
        assert!((h.ahat.trace() - d.a.trace()).norm() < 1e-15);
        let back = from_hats(&h).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn from_hats_rejects_nonzero_corner() {
        let mut h = to_hats(&sample_on_shell(1, 2, c(1.0, 0.0))).unwrap();
        h.ahat[(2, 2)] = c(0.1, 0.0);
        assert!(from_hats(&h).is_err());
    }

    #[test]
    fn commutator_blocks_match_brute_force() {
        let d = sample_on_shell(2, 3, c(1.0, 0.5));
        let h = to_hats(&d).unwrap();
        let comm = h.ahat.commutator(&h.bhat);
        let (tl, tr, bl, corner) = hat_commutator_blocks(&d).unwrap();
        assert!(comm.block(0, 0, 3, 3).sub(&tl).max_abs() < 1e-12);
        assert!(comm.block(0, 3, 3, 1).sub(&tr).max_abs() < 1e-12);
        assert!(comm.block(3, 0, 1, 3).sub(&bl).max_abs() < 1e-12);
        assert!(comm.block(3, 3, 1, 1).sub(&corner).max_abs() < 1e-12);
        // on-shell: corner = tr(ij) = -k tau
        assert!((corner[(0, 0)] - c(-3.0, -1.5)).norm() < 1e-9);
        // upper-left of [Ahat, Bhat] - tauhat vanishes on-shell
        let dev = comm.sub(&h.tau_hat());
        assert!(dev.block(0, 0, 3, 3).max_abs() < 1e-9);
    }

    #[test]
    fn gauge_equivariance_of_hats() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let d = sample_on_shell(3, 3, c(1.0, 0.0));
        let g = Mat::from_fn(3, 3, |p, q| {
            c(
                rng.gen_range(-1.0..1.0) + if p == q { 2.0 } else { 0.0 },
                rng.gen_range(-1.0..1.0),
            )
        });
        let h1 = to_hats(&gauge_act(&g, &d).unwrap()).unwrap();
        let mut gbig = Mat::identity(4);
        gbig.set_block(0, 0, &g);
        let h2a = gbig.mul(&to_hats(&d).unwrap().ahat).mul(&gbig.inverse().unwrap());
        assert!(h1.ahat.sub(&h2a).max_abs() < 1e-10);
    }

    #[test]
    fn embed_is_on_shell_with_pinned_corner() {
        for seed in [1u64, 2, 3] {
            let d = sample_on_shell(seed, 2, c(1.0, 0.0));
            let e = embed(&d, 1e-8).unwrap();
            assert_eq!(e.k, 3);
            let res = moment_residual(&e).unwrap();
            assert!(res.max_abs() < 1e-9, "residual {}", res.max_abs());
            // (j i)_{22} = -(k+1) tau exactly
            let ji = e.j.mul(&e.i);
            assert!((ji[(1, 1)] - c(-3.0, 0.0)).norm() < 1e-15);
            assert!((ji[(1, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn embed_is_gauge_equivariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let d = sample_on_shell(5, 2, c(1.0, 0.0));
        let g = Mat::from_fn(2, 2, |p, q| {
            c(
                rng.gen_range(-1.0..1.0) + if p == q { 2.0 } else { 0.0 },
                rng.gen_range(-1.0..1.0),
            )
        });
        let e1 = embed(&gauge_act(&g, &d).unwrap(), 1e-8).unwrap();
        let e2 = embed(&d, 1e-8).unwrap();
        assert!(points_equal(&e1, &e2, 1e-7).unwrap());
    }

    #[test]
    fn symplectic_pairing_of_hats() {
        // finite-difference two-form identity:
        // tr(dAhat1 dBhat2 - dAhat2 dBhat1) = tr(dA1 dB2 - dA2 dB1) + tr(dj1 di2 - dj2 di1)
        let mut rng = ChaCha12Rng::seed_from_u64(123);
        let k = 3;
        let mut rand_d = || AdhmData::<f64> {
            k,
            a: Mat::from_fn(k, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            b: Mat::from_fn(k, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            i: Mat::from_fn(k, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            j: Mat::from_fn(2, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            tau: c(0.7, 0.0),
        };
        let base = rand_d();
        let t1 = rand_d();
        let t2 = rand_d();
        let eps = 1e-5;
        let shift = |d: &AdhmData<f64>, t: &AdhmData<f64>, s: f64| AdhmData {
            k,
            a: d.a.add(&t.a.scale(c(s, 0.0))),
            b: d.b.add(&t.b.scale(c(s, 0.0))),
            i: d.i.add(&t.i.scale(c(s, 0.0))),
            j: d.j.add(&t.j.scale(c(s, 0.0))),
            tau: d.tau,
        };
        let h0 = to_hats(&base).unwrap();
        let h1 = to_hats(&shift(&base, &t1, eps)).unwrap();
        let h2 = to_hats(&shift(&base, &t2, eps)).unwrap();
        let da1 = h1.ahat.sub(&h0.ahat).scale(c(1.0 / eps, 0.0));
        let db1 = h1.bhat.sub(&h0.bhat).scale(c(1.0 / eps, 0.0));
        let da2 = h2.ahat.sub(&h0.ahat).scale(c(1.0 / eps, 0.0));
        let db2 = h2.bhat.sub(&h0.bhat).scale(c(1.0 / eps, 0.0));
        let lhs = da1.mul(&db2).trace() - da2.mul(&db1).trace();
        let rhs = t1.a.mul(&t2.b).trace() - t2.a.mul(&t1.b).trace()
            + t1.j.mul(&t2.i).trace()
            - t2.j.mul(&t1.i).trace();
        assert!((lhs - rhs).norm() < 1e-8, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn stability_k1_cases() {
        let mk = |i1: f64| AdhmData {
            k: 1,
            a: Mat::zeros(1, 1),
            b: Mat::zeros(1, 1),
            i: Mat::from_rows(vec![vec![c(i1, 0.0), c(0.0, 0.0)]]),
            j: Mat::from_rows(vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]]),
            tau: c(0.0, 0.0),
        };
        assert!(!is_stable(&mk(0.0)).unwrap());
        assert!(is_stable(&mk(1.0)).unwrap());
    }

    #[test]
    fn embed_preserves_regularity() {
        for seed in [11u64, 12, 13] {
            let d = sample_on_shell(seed, 2, c(1.0, 0.0));
            assert!(is_regular(&d).unwrap(), "seed {seed}: sample not regular");
            let e = embed(&d, 1e-8).unwrap();
            assert!(is_stable(&e).unwrap());
            assert!(is_costable(&e).unwrap());
        }
    }

    #[test]
    fn stability_is_gauge_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let d = sample_on_shell(21, 3, c(1.0, 0.0));
        let g = Mat::from_fn(3, 3, |p, q| {
            c(
                rng.gen_range(-1.0..1.0) + if p == q { 2.0 } else { 0.0 },
                rng.gen_range(-1.0..1.0),
            )
        });
        let dg = gauge_act(&g, &d).unwrap();
        assert_eq!(is_stable(&d).unwrap(), is_stable(&dg).unwrap());
        assert_eq!(is_costable(&d).unwrap(), is_costable(&dg).unwrap());
    }
}
