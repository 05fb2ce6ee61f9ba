//! Normal forms for the `GL(k)` action on bordered `(k+1) x (k+1)` matrices:
//! the companion-type slice `(r, s)`, its characteristic-polynomial
//! invariants, the strongly semisimple canonical form, and the explicit
//! diagonalizing pair `(g, g^{-1})`.
//!
//! Throughout, `GL(k)` acts by conjugation with `diag(g, 1)`, so the corner
//! entry and the bottom-row/last-column pairing structure are preserved.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::{Real, C};

/// Default relative separation below which eigenvalues count as colliding.
pub const TOL_SEP: f64 = 1e-8;

/// Slice normal form: companion-type matrix with last-two columns `(r, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceForm<R: Real> {
    pub r: Vec<C<R>>,
    pub s: Vec<C<R>>,
}

impl<R: Real> SliceForm<R> {
    pub fn k(&self) -> usize {
        self.r.len()
    }

    /// Assembles the `(k+1) x (k+1)` matrix: subdiagonal ones in the first
    /// `k-1` columns, column `k` is `(r, 1)`, column `k+1` is `s`.
    pub fn assemble(&self) -> Mat<R> {
        let k = self.k();
        assert_eq!(self.s.len(), k + 1, "s must have length k+1");
        let mut m = Mat::zeros(k + 1, k + 1);
        for c in 0..k.saturating_sub(1) {
            m[(c + 1, c)] = C::<R>::one();
        }
        for p in 0..k {
            m[(p, k - 1)] = self.r[p];
            m[(p, k)] = self.s[p];
        }
        m[(k, k - 1)] = C::<R>::one();
        m[(k, k)] = self.s[k];
        m
    }
}

/// Strongly semisimple canonical form: `diag(lambda)` with last column `x`,
/// bottom row all ones, corner `big_lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSS<R: Real> {
    pub lambda: Vec<C<R>>,
    pub x: Vec<C<R>>,
    pub big_lambda: C<R>,
}

impl<R: Real> CanonicalSS<R> {
    pub fn k(&self) -> usize {
        self.lambda.len()
    }

    pub fn assemble(&self) -> Mat<R> {
        let k = self.k();
        let mut m = Mat::zeros(k + 1, k + 1);
        for p in 0..k {
            m[(p, p)] = self.lambda[p];
            m[(p, k)] = self.x[p];
            m[(k, p)] = C::<R>::one();
        }
        m[(k, k)] = self.big_lambda;
        m
    }
}

/// Deterministic eigenvalue order: by real part, then imaginary part.
pub fn sort_eigenvalues<R: Real>(mut lam: Vec<C<R>>) -> Vec<C<R>> {
    lam.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    lam
}

fn min_separation<R: Real>(lam: &[C<R>]) -> R {
    let mut best = R::infinity();
    for p in 0..lam.len() {
        for q in p + 1..lam.len() {
            best = best.min((lam[p] - lam[q]).norm());
        }
    }
    best
}

fn spectral_scale<R: Real>(lam: &[C<R>]) -> R {
    lam.iter().map(|z| z.norm()).fold(R::one(), |s, x| s.max(x))
}

/// Splits a bordered matrix into `(A, xi, y, corner)`:
/// top-left `k x k`, last column, bottom row, corner entry.
fn split_hat<R: Real>(ahat: &Mat<R>) -> Result<(Mat<R>, Mat<R>, Mat<R>, C<R>)> {
    if !ahat.is_square() || ahat.rows < 2 {
        return Err(Error::Invalid("bordered matrix must be square, size >= 2".into()));
    }
    let k = ahat.rows - 1;
    Ok((
        ahat.block(0, 0, k, k),
        ahat.block(0, k, k, 1),
        ahat.block(k, 0, 1, k),
        ahat[(k, k)],
    ))
}

/// Eigenvalues of `a` and, for each, an eigenvector; requires every geometric
/// multiplicity to be 1 (i.e. `a` regular), else returns `None`.
fn regular_eigen<R: Real>(a: &Mat<R>) -> Result<Option<(Vec<C<R>>, Mat<R>)>> {
    let k = a.rows;
    let (lam, vecs) = linalg::eigen(a)?;
    let scale = spectral_scale(&lam);
    let sep = R::from_f64(TOL_SEP).unwrap() * scale;
    // cluster coincident eigenvalues; regularity demands rank(A - lam) = k-1
    let mut used = vec![false; k];
    for p in 0..k {
        if used[p] {
            continue;
        }
        let mut cluster = 1usize;
        for q in p + 1..k {
            if (lam[p] - lam[q]).norm() < sep {
                used[q] = true;
                cluster += 1;
            }
        }
        if cluster > 1 {
            let mut shifted = a.clone();
            for d in 0..k {
                shifted[(d, d)] = shifted[(d, d)] - lam[p];
            }
            let r = linalg::rank(&shifted, R::from_f64(1e-9).unwrap())?;
            if r < k - 1 {
                return Ok(None); // geometric multiplicity >= 2: not regular
            }
        }
    }
    Ok(Some((lam, vecs)))
}

/// Membership in the open set where the slice applies: the top-left block is
/// regular and pairs nontrivially with the bottom row on every eigenvector.
pub fn in_g0<R: Real>(ahat: &Mat<R>) -> Result<bool> {
    let (a, _, y, _) = split_hat(ahat)?;
    let reg = match regular_eigen(&a)? {
        Some(r) => r,
        None => return Ok(false),
    };
    let (lam, vecs) = reg;
    let k = a.rows;
    let yscale = y.frobenius_norm().max(R::epsilon());
    let thresh = R::from_f64(TOL_SEP).unwrap() * yscale;
    for p in 0..k {
        let v = Mat::from_fn(k, 1, |i, _| vecs[(i, p)]);
        let pairing = y.mul(&v)[(0, 0)];
        if pairing.norm() <= thresh {
            return Ok(false);
        }
    }
    let _ = lam;
    Ok(true)
}

/// Strong semisimplicity: additionally both the block and the full matrix
/// have well-separated eigenvalue sets.
pub fn in_g1<R: Real>(ahat: &Mat<R>) -> Result<bool> {
    if !in_g0(ahat)? {
        return Ok(false);
    }
    let (a, _, _, _) = split_hat(ahat)?;
    let lam = linalg::eigenvalues(&a)?;
    let lamhat = linalg::eigenvalues(ahat)?;
    let sep = R::from_f64(TOL_SEP).unwrap();
    Ok(min_separation(&lam) > sep * spectral_scale(&lam)
        && min_separation(&lamhat) > sep * spectral_scale(&lamhat))
}

/// The unique `X = sum c_i A^i` with bottom row `y`, for `A` in companion
/// form; errors when `X` would be singular (some eigenvector pairing of `y`
/// vanishes).
pub fn lemma_x_solve<R: Real>(a: &Mat<R>, y: &Mat<R>) -> Result<Mat<R>> {
    let k = a.rows;
    if y.rows != 1 || y.cols != k {
        return Err(Error::Invalid("y must be a 1 x k covector".into()));
    }
    // rows of the system: bottom row of A^i
    let mut powers: Vec<Mat<R>> = Vec::with_capacity(k);
    let mut acc = Mat::identity(k);
    for _ in 0..k {
        powers.push(acc.clone());
        acc = a.mul(&acc);
    }
    // solve sum_i c_i e_k^T A^i = y  <=>  M^T c = y^T with M rows = bottom rows
    let m = Mat::from_fn(k, k, |row, col| powers[col][(k - 1, row)]);
    let c = m.solve(&y.t())?;
    // invertibility of X: sum c_i lambda^i away from zero for each eigenvalue
    let lam = linalg::eigenvalues(a)?;
    let coeffs: Vec<C<R>> = (0..k).map(|i| c[(i, 0)]).collect();
    let cscale = coeffs.iter().map(|z| z.norm()).fold(R::epsilon(), |s, x| s.max(x));
    for &l in &lam {
        let val = linalg::poly_eval(&coeffs, l);
        if val.norm() <= R::from_f64(TOL_SEP).unwrap() * cscale {
            return Err(Error::Degenerate(
                "vanishing eigenvector pairing: X would be singular".into(),
            ));
        }
    }
    let mut x = Mat::zeros(k, k);
    for (i, p) in powers.iter().enumerate() {
        x = x.add(&p.scale(coeffs[i]));
    }
    Ok(x)
}

/// Companion form of a regular matrix: returns `(K, r)` with
/// `K^{-1} A K` the lower-shift companion matrix whose last column is `r`.
fn companionize<R: Real>(a: &Mat<R>) -> Result<(Mat<R>, Vec<C<R>>)> {
    let k = a.rows;
    let tol = R::from_f64(1e-7).unwrap();
    let mut candidates: Vec<Mat<R>> = (0..k)
        .map(|p| Mat::from_fn(k, 1, |i, _| if i == p { C::<R>::one() } else { C::<R>::zero() }))
        .collect();
    // deterministic fallback vectors past the coordinate ones
    for extra in 0..4u32 {
        candidates.push(Mat::from_fn(k, 1, |i, _| {
            let t = R::from_u32((i as u32 + 1) * (extra + 2)).unwrap();
            C::<R>::new(t.sin(), (t + t).cos())
        }));
    }
    for b in candidates {
        let mut kmat = Mat::zeros(k, k);
        let mut v = b.clone();
        for col in 0..k {
            kmat.set_block(0, col, &v);
            v = a.mul(&v);
        }
        let sv = linalg::singular_values(&kmat)?;
        if sv[k - 1] <= tol * sv[0] {
            continue; // not cyclic enough
        }
        let r = kmat.solve(&v)?; // K r = A^k b
        return Ok((kmat, (0..k).map(|p| r[(p, 0)]).collect()));
    }
    Err(Error::Degenerate("no well-conditioned cyclic vector found".into()))
}

/// Conjugates a bordered matrix into the slice; returns the normal form and
/// the `GL(k)` conjugator `g` with `diag(g,1) . ahat . diag(g,1)^{-1}`
/// assembling the slice form.
pub fn to_slice<R: Real>(ahat: &Mat<R>) -> Result<(SliceForm<R>, Mat<R>)> {
    if !in_g0(ahat)? {
        return Err(Error::Degenerate("input outside the slice's open set".into()));
    }
    let (a, xi, y, corner) = split_hat(ahat)?;
    let (kmat, r) = companionize(&a)?;
    let kinv = kmat.inverse()?;
    let companion = kinv.mul(&a).mul(&kmat);
    let y1 = y.mul(&kmat);
    let xi1 = kinv.mul(&xi);
    let x = lemma_x_solve(&companion, &y1)?;
    let xi2 = x.mul(&xi1);
    let g = x.mul(&kinv);
    let k = a.rows;
    let mut s: Vec<C<R>> = (0..k).map(|p| xi2[(p, 0)]).collect();
    s.push(corner);
    Ok((SliceForm { r, s }, g))
}

/// The characteristic polynomials `(q, qhat)` of the block and of the whole
/// assembled slice matrix, as coefficient vectors (constant term first).
pub fn charpolys_from_slice<R: Real>(sf: &SliceForm<R>) -> (Vec<C<R>>, Vec<C<R>>) {
    let k = sf.k();
    // q(z) = z^k - sum r_i z^{i-1}
    let mut q = vec![C::<R>::zero(); k + 1];
    q[k] = C::<R>::one();
    for p in 0..k {
        q[p] = -sf.r[p];
    }
    // qhat(z) = (z - s_{k+1}) q(z) - sum_{i<=k} s_i z^{i-1}
    let mut qhat = vec![C::<R>::zero(); k + 2];
    for p in 0..=k {
        qhat[p + 1] = qhat[p + 1] + q[p];
        qhat[p] = qhat[p] - sf.s[k] * q[p];
    }
    for p in 0..k {
        qhat[p] = qhat[p] - sf.s[p];
    }
    (q, qhat)
}

/// Inverse of [`charpolys_from_slice`]; `q` monic of degree `k`, `qhat` monic
/// of degree `k+1`.
pub fn slice_from_charpolys<R: Real>(q: &[C<R>], qhat: &[C<R>]) -> Result<SliceForm<R>> {
    let k = q.len().saturating_sub(1);
    if k == 0 || qhat.len() != k + 2 {
        return Err(Error::Invalid("degree mismatch between q and qhat".into()));
    }
    let tol = R::from_f64(1e-9).unwrap();
    if (q[k] - C::<R>::one()).norm() > tol || (qhat[k + 1] - C::<R>::one()).norm() > tol {
        return Err(Error::Invalid("q and qhat must be monic".into()));
    }
    let r: Vec<C<R>> = (0..k).map(|p| -q[p]).collect();
    // coefficient of z^k in (z - s_{k+1}) q - qhat must vanish:
    // q_{k-1} - s_{k+1} - qhat_k = 0
    let s_last = q[k - 1] - qhat[k];
    let mut s = vec![C::<R>::zero(); k + 1];
    for p in 0..k {
        let from_zq = if p == 0 { C::<R>::zero() } else { q[p - 1] };
        s[p] = from_zq - s_last * q[p] - qhat[p];
    }
    s[k] = s_last;
    Ok(SliceForm { r, s })
}

/// Canonical form of a strongly semisimple bordered matrix, with the
/// `GL(k)` conjugator realizing it.
pub fn canonical_ss<R: Real>(ahat: &Mat<R>) -> Result<(CanonicalSS<R>, Mat<R>)> {
    if !in_g1(ahat)? {
        return Err(Error::Degenerate("input is not strongly semisimple".into()));
    }
    let (a, _xi, y, corner) = split_hat(ahat)?;
    let k = a.rows;
    let lam = sort_eigenvalues(linalg::eigenvalues(&a)?);
    let lamhat = sort_eigenvalues(linalg::eigenvalues(ahat)?);

    // x_i = -prod_j (lam_i - lamhat_j) / prod_{j != i} (lam_i - lam_j)
    let mut x = Vec::with_capacity(k);
    for p in 0..k {
        let mut num = C::<R>::one();
        for &lh in &lamhat {
            num = num * (lam[p] - lh);
        }
        let mut den = C::<R>::one();
        for q in 0..k {
            if q != p {
                den = den * (lam[p] - lam[q]);
            }
        }
        x.push(-num / den);
    }
    let big_lambda = corner;

    // conjugator: diagonalize A in the sorted order, then scale rows so the
    // bottom covector becomes (1, ..., 1)
    let (raw_lam, vecs) = linalg::eigen(&a)?;
    let mut perm: Vec<usize> = (0..k).collect();
    // match raw eigenvalue order to the sorted one greedily
    let mut taken = vec![false; k];
    for (slot, &target) in lam.iter().enumerate() {
        let mut best = usize::MAX;
        let mut best_d = R::infinity();
        for (p, &rl) in raw_lam.iter().enumerate() {
            if !taken[p] {
                let d = (rl - target).norm();
                if d < best_d {
                    best_d = d;
                    best = p;
                }
            }
        }
        taken[best] = true;
        perm[slot] = best;
    }
    let pinv = Mat::from_fn(k, k, |i, slot| vecs[(i, perm[slot])]);
    let p = pinv.inverse()?;
    let y1 = y.mul(&pinv); // bottom covector after diagonalizing
    let mut g = Mat::zeros(k, k);
    for slot in 0..k {
        let d = y1[(0, slot)];
        if d.is_zero() {
            return Err(Error::Degenerate("vanishing bottom pairing".into()));
        }
        for col in 0..k {
            g[(slot, col)] = d * p[(slot, col)];
        }
    }
    Ok((
        CanonicalSS {
            lambda: lam,
            x,
            big_lambda,
        },
        g,
    ))
}

/// The diagonalizing pair for the canonical assembly with spectra
/// `(lambda, lambdahat)`, straight from the closed-form entries; no internal
/// sorting, the caller's order is respected.
pub fn g_pair<R: Real>(lambda: &[C<R>], lambdahat: &[C<R>]) -> Result<(Mat<R>, Mat<R>)> {
    let k = lambda.len();
    if lambdahat.len() != k + 1 {
        return Err(Error::Invalid("lambdahat must have length k+1".into()));
    }
    let sep = R::from_f64(TOL_SEP).unwrap();
    if min_separation(lambda) <= sep * spectral_scale(lambda)
        || min_separation(lambdahat) <= sep * spectral_scale(lambdahat)
    {
        return Err(Error::Degenerate("eigenvalue collision in g_pair".into()));
    }
    let g = Mat::from_fn(k + 1, k + 1, |i, j| {
        let mut num = C::<R>::one();
        if j < k {
            for (m, &lm) in lambda.iter().enumerate() {
                if m != j {
                    num = num * (lambdahat[i] - lm);
                }
            }
        } else {
            for &lm in lambda {
                num = num * (lambdahat[i] - lm);
            }
        }
        let mut den = C::<R>::one();
        for (n, &ln) in lambdahat.iter().enumerate() {
            if n != i {
                den = den * (lambdahat[i] - ln);
            }
        }
        num / den
    });
    let ginv = Mat::from_fn(k + 1, k + 1, |i, j| {
        if i == k {
            C::<R>::one()
        } else {
            let mut num = C::<R>::one();
            for (m, &lm) in lambdahat.iter().enumerate() {
                if m != j {
                    num = num * (lambda[i] - lm);
                }
            }
            let mut den = C::<R>::one();
            for (n, &ln) in lambda.iter().enumerate() {
                if n != i {
                    den = den * (lambda[i] - ln);
                }
            }
            num / den
        }
    });
    Ok((g, ginv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hat(rng: &mut ChaCha12Rng, k: usize) -> Mat<f64> {
        Mat::from_fn(k + 1, k + 1, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn embed_g(g: &Mat<f64>) -> Mat<f64> {
        let k = g.rows;
        let mut big = Mat::identity(k + 1);
        big.set_block(0, 0, g);
        big
    }

    #[test]
    fn membership_examples() {
        let swap = Mat::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(in_g0(&swap).unwrap());
        assert!(in_g1(&swap).unwrap());
        let nilp = Mat::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(!in_g0(&nilp).unwrap());
        // repeated full-spectrum eigenvalue kills in_g1 but can keep in_g0
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let m = random_hat(&mut rng, 2);
        let sym = m.add(&Mat::scalar(3, c(5.0, 0.0)));
        assert_eq!(in_g1(&sym).unwrap(), in_g1(&m).unwrap());
    }

    #[test]
    fn lemma_solver_basics() {
        // y = (0,...,0,1) gives X = I
        let sf = SliceForm {
            r: vec![c(1.0, 0.0), c(0.0, 0.5), c(-0.3, 0.0)],
            s: vec![c(0.0, 0.0); 4],
        };
        let a = sf.assemble().block(0, 0, 3, 3);
        let y = Mat::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]]);
        let x = lemma_x_solve(&a, &y).unwrap();
        assert!(x.sub(&Mat::identity(3)).max_abs() < 1e-12);

        // k=1: A=[alpha], y=(beta) -> X=[beta]
        let a1 = Mat::scalar(1, c(0.7, -0.2));
        let y1 = Mat::from_rows(vec![vec![c(2.5, 1.0)]]);
        let x1 = lemma_x_solve(&a1, &y1).unwrap();
        assert!((x1[(0, 0)] - c(2.5, 1.0)).norm() < 1e-14);

        // random k=3 companion, generic y: both postconditions
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let sf = SliceForm {
            r: (0..3).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            s: vec![c(0.0, 0.0); 4],
        };
        let a = sf.assemble().block(0, 0, 3, 3);
        let y = Mat::from_fn(1, 3, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let x = lemma_x_solve(&a, &y).unwrap();
        assert!(x.mul(&a).sub(&a.mul(&x)).max_abs() < 1e-9);
        let bottom = Mat::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]]);
        let back = bottom.mul(&x);
        assert!(back.sub(&y).max_abs() < 1e-9);
        assert!(y.mul(&x.inverse().unwrap()).sub(&bottom).max_abs() < 1e-8);
    }

    #[test]
    fn to_slice_conjugates_correctly() {
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        for k in 2..=4 {
            let ahat = random_hat(&mut rng, k);
            if !in_g0(&ahat).unwrap() {
                continue;
            }
            let (sf, g) = to_slice(&ahat).unwrap();
            let big = embed_g(&g);
            let conj = big.mul(&ahat).mul(&big.inverse().unwrap());
            let err = conj.sub(&sf.assemble()).max_abs();
            assert!(err < 1e-8, "k={k} error {err}");
        }
    }

    #[test]
    fn slice_is_a_complete_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        for k in 2..=5 {
            let ahat = random_hat(&mut rng, k);
            if !in_g0(&ahat).unwrap() {
                continue;
            }
            let g = Mat::from_fn(k, k, |p, q| {
                c(
                    rng.gen_range(-1.0..1.0) + if p == q { 2.0 } else { 0.0 },
                    rng.gen_range(-1.0..1.0),
                )
            });
            let big = embed_g(&g);
            let other = big.mul(&ahat).mul(&big.inverse().unwrap());
            let (sf1, _) = to_slice(&ahat).unwrap();
            let (sf2, _) = to_slice(&other).unwrap();
            for p in 0..k {
                assert!((sf1.r[p] - sf2.r[p]).norm() < 1e-7, "r[{p}] differs at k={k}");
            }
            for p in 0..=k {
                assert!((sf1.s[p] - sf2.s[p]).norm() < 1e-7, "s[{p}] differs at k={k}");
            }
        }
    }

    #[test]
    fn to_slice_fixes_slice_points() {
        let sf = SliceForm {
            r: vec![c(0.3, 0.1), c(-0.2, 0.0), c(0.9, -0.4)],
            s: vec![c(1.0, 0.0), c(0.2, 0.2), c(-0.5, 0.0), c(0.1, 0.3)],
        };
        let m = sf.assemble();
        let (sf2, g) = to_slice(&m).unwrap();
        assert!(g.sub(&Mat::identity(3)).max_abs() < 1e-9);
        for p in 0..3 {
            assert!((sf.r[p] - sf2.r[p]).norm() < 1e-10);
        }
        for p in 0..4 {
            assert!((sf.s[p] - sf2.s[p]).norm() < 1e-10);
        }
    }

    #[test]
    fn k1_pinned_slice() {
        // [[0,1],[1,0]] -> r=(0), s=(1,0)
        let m = Mat::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let (sf, _) = to_slice(&m).unwrap();
        assert!((sf.r[0] - c(0.0, 0.0)).norm() < 1e-12);
        assert!((sf.s[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((sf.s[1] - c(0.0, 0.0)).norm() < 1e-12);
        // q = z, qhat = z^2 - 1
        let (q, qhat) = charpolys_from_slice(&sf);
        assert!((q[0]).norm() < 1e-12 && (q[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((qhat[0] + c(1.0, 0.0)).norm() < 1e-12);
        assert!(qhat[1].norm() < 1e-12);
        assert!((qhat[2] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn charpoly_round_trip_and_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let k = 4;
        let sf = SliceForm {
            r: (0..k).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            s: (0..=k).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        };
        let (q, qhat) = charpolys_from_slice(&sf);
        let back = slice_from_charpolys(&q, &qhat).unwrap();
        for p in 0..k {
            assert!((back.r[p] - sf.r[p]).norm() < 1e-12);
        }
        for p in 0..=k {
            assert!((back.s[p] - sf.s[p]).norm() < 1e-12);
        }
        // qhat equals the numerically computed characteristic polynomial
        let m = sf.assemble();
        let num = linalg::charpoly(&m);
        for p in 0..=k + 1 {
            assert!((num[p] - qhat[p]).norm() < 1e-8, "coeff {p}");
        }
        // and q that of the block
        let numq = linalg::charpoly(&m.block(0, 0, k, k));
        for p in 0..=k {
            assert!((numq[p] - q[p]).norm() < 1e-8);
        }
    }

    #[test]
    fn assembled_slice_is_regular() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let k = 3;
        let sf = SliceForm {
            r: (0..k).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            s: (0..=k).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        };
        let m = sf.assemble();
        // regularity: the Krylov matrix of any cyclic vector has full rank;
        // equivalently companionize succeeds on the full (k+1) matrix
        assert!(companionize(&m).is_ok());
    }

    #[test]
    fn canonical_k1_pinned() {
        let m = Mat::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let (css, g) = canonical_ss(&m).unwrap();
        assert!((css.lambda[0]).norm() < 1e-12);
        assert!((css.x[0] - c(1.0, 0.0)).norm() < 1e-10);
        assert!(css.big_lambda.norm() < 1e-12);
        let big = embed_g(&g);
        let conj = big.mul(&m).mul(&big.inverse().unwrap());
        assert!(conj.sub(&css.assemble()).max_abs() < 1e-10);
    }

    #[test]
    fn canonical_matches_direct_conjugation() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for k in 2..=4 {
            let ahat = random_hat(&mut rng, k);
            if !in_g1(&ahat).unwrap() {
                continue;
            }
            let (css, g) = canonical_ss(&ahat).unwrap();
            let big = embed_g(&g);
            let conj = big.mul(&ahat).mul(&big.inverse().unwrap());
            let err = conj.sub(&css.assemble()).max_abs();
            assert!(err < 1e-8, "k={k} error {err}");
            // x_i formula consistency: charpoly of assembly = prod (z - lamhat)
            let lamhat = sort_eigenvalues(linalg::eigenvalues(&ahat).unwrap());
            let expect = linalg::poly_from_roots(&lamhat);
            let got = linalg::charpoly(&css.assemble());
            for p in 0..=k + 1 {
                assert!((expect[p] - got[p]).norm() < 1e-7, "k={k} coeff {p}");
            }
        }
    }

    #[test]
    fn g_pair_k1_pinned() {
        let lambda = [c(0.0, 0.0)];
        let lamhat = [c(1.0, 0.0), c(-1.0, 0.0)];
        let (g, ginv) = g_pair(&lambda, &lamhat).unwrap();
        let eg = Mat::from_rows(vec![
            vec![c(0.5, 0.0), c(0.5, 0.0)],
            vec![c(-0.5, 0.0), c(0.5, 0.0)],
        ]);
        let eginv = Mat::from_rows(vec![
            vec![c(1.0, 0.0), c(-1.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        ]);
        assert!(g.sub(&eg).max_abs() < 1e-12);
        assert!(ginv.sub(&eginv).max_abs() < 1e-12);
        let m = Mat::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let diag = g.mul(&m).mul(&ginv);
        assert!((diag[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((diag[(1, 1)] + c(1.0, 0.0)).norm() < 1e-12);
        assert!(diag[(0, 1)].norm() < 1e-12 && diag[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn g_pair_inverse_and_diagonalization() {
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        let k = 5;
        let lambda: Vec<Complex64> = (0..k)
            .map(|p| c(p as f64 + 0.3 * rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let lamhat: Vec<Complex64> = (0..=k)
            .map(|p| c(p as f64 + 0.5 + 0.3 * rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let (g, ginv) = g_pair(&lambda, &lamhat).unwrap();
        assert!(g.mul(&ginv).sub(&Mat::identity(k + 1)).max_abs() < 1e-10);
        for j in 0..=k {
            assert!((ginv[(k, j)] - c(1.0, 0.0)).norm() < 1e-15, "last row of ginv");
        }
        // g diagonalizes the canonical assembly built from these spectra
        let x: Vec<Complex64> = (0..k)
            .map(|p| {
                let mut num = c(1.0, 0.0);
                for &lh in &lamhat {
                    num *= lambda[p] - lh;
                }
                let mut den = c(1.0, 0.0);
                for q in 0..k {
                    if q != p {
                        den *= lambda[p] - lambda[q];
                    }
                }
                -num / den
            })
            .collect();
        let css = CanonicalSS {
            lambda: lambda.clone(),
            x,
            big_lambda: lamhat.iter().sum::<Complex64>() - lambda.iter().sum::<Complex64>(),
        };
        let m = css.assemble();
        let diag = g.mul(&m).mul(&ginv);
        for p in 0..=k {
            assert!((diag[(p, p)] - lamhat[p]).norm() < 1e-8);
            for q in 0..=k {
                if p != q {
                    assert!(diag[(p, q)].norm() < 1e-8 * m.frobenius_norm());
                }
            }
        }
    }
}
