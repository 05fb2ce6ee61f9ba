//! Small dense complex linear algebra, generic over the real scalar.
//!
//! Everything here targets the tiny matrices of this library (dimension at
//! most a few dozen): LU with partial pivoting, a Schur-form eigensolver
//! (Householder reduction to Hessenberg form followed by shifted QR with
//! Givens rotations), singular values through the Gram matrix, and the
//! polynomial utilities the slice normal form needs.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::{Real, C};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<R: Real> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C<R>>,
}

impl<R: Real> Mat<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![C::<R>::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::<R>::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<R>) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C<R>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn scalar(n: usize, z: C<R>) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag(entries: &[C<R>]) -> Self {
        let n = entries.len();
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = entries[i];
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn t(&self) -> Mat<R> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn h(&self) -> Mat<R> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &Mat<R>) -> Mat<R> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat<R>) -> Mat<R> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Mat<R> {
        self.scale(-C::<R>::one())
    }

    pub fn scale(&self, z: C<R>) -> Mat<R> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn mul(&self, other: &Mat<R>) -> Mat<R> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C<R> {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).fold(C::<R>::zero(), |s, z| s + z)
    }

    pub fn frobenius_norm(&self) -> R {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(R::zero(), |s, x| s + x)
            .sqrt()
    }

    pub fn max_abs(&self) -> R {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(R::zero(), |s, x| s.max(x))
    }

    pub fn commutator(&self, other: &Mat<R>) -> Mat<R> {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat<R> {
        Mat::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat<R>) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn col(&self, j: usize) -> Vec<C<R>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<C<R>> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn pow(&self, mut e: usize) -> Mat<R> {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Mat::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Stacks `[[m11, m12], [m21, m22]]`.
    pub fn block2x2(m11: &Mat<R>, m12: &Mat<R>, m21: &Mat<R>, m22: &Mat<R>) -> Mat<R> {
        assert_eq!(m11.rows, m12.rows);
        assert_eq!(m21.rows, m22.rows);
        assert_eq!(m11.cols, m21.cols);
        assert_eq!(m12.cols, m22.cols);
        let mut out = Mat::zeros(m11.rows + m21.rows, m11.cols + m12.cols);
        out.set_block(0, 0, m11);
        out.set_block(0, m11.cols, m12);
        out.set_block(m11.rows, 0, m21);
        out.set_block(m11.rows, m11.cols, m22);
        out
    }

    pub fn hstack(left: &Mat<R>, right: &Mat<R>) -> Mat<R> {
        assert_eq!(left.rows, right.rows);
        let mut out = Mat::zeros(left.rows, left.cols + right.cols);
        out.set_block(0, 0, left);
        out.set_block(0, left.cols, right);
        out
    }

    /// LU factorization with partial pivoting; returns the packed factors,
    /// pivot indices and the pivot sign.
    fn lu(&self) -> Result<(Mat<R>, Vec<usize>, R)> {
        if !self.is_square() {
            return Err(Error::Invalid("lu of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = R::one();
        for col in 0..n {
            let mut best = col;
            let mut best_mag = a[(col, col)].norm();
            for r in col + 1..n {
                let mag = a[(r, col)].norm();
                if mag > best_mag {
                    best = r;
                    best_mag = mag;
                }
            }
            if best_mag == R::zero() {
                return Err(Error::Singular(format!("zero pivot at column {col}")));
            }
            if best != col {
                for j in 0..n {
                    a.data.swap(col * n + j, best * n + j);
                }
                piv.swap(col, best);
                sign = -sign;
            }
            let pivot = a[(col, col)];
            for r in col + 1..n {
                let factor = a[(r, col)] / pivot;
                a[(r, col)] = factor;
                for j in col + 1..n {
                    let v = a[(col, j)];
                    a[(r, j)] = a[(r, j)] - factor * v;
                }
            }
        }
        Ok((a, piv, sign))
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &Mat<R>) -> Result<Mat<R>> {
        let (lu, piv, _) = self.lu()?;
        let n = self.rows;
        if rhs.rows != n {
            return Err(Error::Invalid("rhs row count mismatch in solve".into()));
        }
        let mut x = Mat::zeros(n, rhs.cols);
        for i in 0..n {
            for j in 0..rhs.cols {
                x[(i, j)] = rhs[(piv[i], j)];
            }
        }
        // forward substitution with unit lower factor
        for i in 0..n {
            for l in 0..i {
                let f = lu[(i, l)];
                for j in 0..rhs.cols {
                    let v = x[(l, j)];
                    x[(i, j)] = x[(i, j)] - f * v;
                }
            }
        }
        // back substitution
        for i in (0..n).rev() {
            for l in i + 1..n {
                let f = lu[(i, l)];
                for j in 0..rhs.cols {
                    let v = x[(l, j)];
                    x[(i, j)] = x[(i, j)] - f * v;
                }
            }
            let d = lu[(i, i)];
            for j in 0..rhs.cols {
                x[(i, j)] = x[(i, j)] / d;
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Mat<R>> {
        self.solve(&Mat::identity(self.rows))
    }

    pub fn det(&self) -> C<R> {
        match self.lu() {
            Ok((lu, _, sign)) => {
                let mut d = C::<R>::new(sign, R::zero());
                for i in 0..self.rows {
                    d = d * lu[(i, i)];
                }
                d
            }
            Err(_) => C::<R>::zero(),
        }
    }

    /// Conjugation `g self g^{-1}`.
    pub fn conjugate_by(&self, g: &Mat<R>) -> Result<Mat<R>> {
        Ok(g.mul(self).mul(&g.inverse()?))
    }
}

impl<R: Real> std::ops::Index<(usize, usize)> for Mat<R> {
    type Output = C<R>;
    fn index(&self, (i, j): (usize, usize)) -> &C<R> {
        &self.data[i * self.cols + j]
    }
}

impl<R: Real> std::ops::IndexMut<(usize, usize)> for Mat<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<R> {
        &mut self.data[i * self.cols + j]
    }
}

/// A Givens rotation `[[c, s], [-conj(s), c]]` with real `c`, zeroing the
/// second component of `(f, g)`.
fn givens<R: Real>(f: C<R>, g: C<R>) -> (R, C<R>) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == R::zero() {
        return (R::one(), C::<R>::zero());
    }
    if fn_ == R::zero() {
        return (R::zero(), C::<R>::one());
    }
    let r = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / r;
    let phase = f / C::<R>::new(fn_, R::zero());
    let s = phase * g.conj() / C::<R>::new(r, R::zero());
    (c, s)
}

/// Reduces to upper Hessenberg form by Householder reflections; returns
/// `(H, Q)` with `A = Q H Q^H`.
fn hessenberg<R: Real>(a: &Mat<R>) -> (Mat<R>, Mat<R>) {
    let n = a.rows;
    let mut h = a.clone();
    let mut q = Mat::identity(n);
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the subdiagonal.
        let mut v: Vec<C<R>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = {
            let norm = v
                .iter()
                .map(|z| z.norm_sqr())
                .fold(R::zero(), |s, x| s + x)
                .sqrt();
            if norm == R::zero() {
                continue;
            }
            let x0 = v[0];
            let phase = if x0.is_zero() {
                C::<R>::one()
            } else {
                x0 / C::<R>::new(x0.norm(), R::zero())
            };
            -phase * C::<R>::new(norm, R::zero())
        };
        v[0] = v[0] - alpha;
        let vnorm_sq = v
            .iter()
            .map(|z| z.norm_sqr())
            .fold(R::zero(), |s, x| s + x);
        if vnorm_sq == R::zero() {
            continue;
        }
        let beta = C::<R>::new(R::from_f64(2.0).unwrap() / vnorm_sq, R::zero());
        // H := P H P with P = I - beta v v^H acting on rows/cols k+1..n.
        // rows
        for j in 0..n {
            let mut dot = C::<R>::zero();
            for (idx, i) in (k + 1..n).enumerate() {
                dot = dot + v[idx].conj() * h[(i, j)];
            }
            let f = beta * dot;
            for (idx, i) in (k + 1..n).enumerate() {
                h[(i, j)] = h[(i, j)] - f * v[idx];
            }
        }
        // cols
        for i in 0..n {
            let mut dot = C::<R>::zero();
            for (idx, j) in (k + 1..n).enumerate() {
                dot = dot + h[(i, j)] * v[idx];
            }
            let f = beta * dot;
            for (idx, j) in (k + 1..n).enumerate() {
                h[(i, j)] = h[(i, j)] - f * v[idx].conj();
            }
        }
        // accumulate Q := Q P
        for i in 0..n {
            let mut dot = C::<R>::zero();
            for (idx, j) in (k + 1..n).enumerate() {
                dot = dot + q[(i, j)] * v[idx];
            }
            let f = beta * dot;
            for (idx, j) in (k + 1..n).enumerate() {
                q[(i, j)] = q[(i, j)] - f * v[idx].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C::<R>::zero();
        }
    }
    (h, q)
}

/// Schur decomposition `A = Q T Q^H` with `T` upper triangular, by shifted QR.
pub fn schur<R: Real>(a: &Mat<R>) -> Result<(Mat<R>, Mat<R>)> {
    if !a.is_square() {
        return Err(Error::Invalid("schur of a non-square matrix".into()));
    }
    let n = a.rows;
    if n == 0 {
        return Ok((Mat::zeros(0, 0), Mat::zeros(0, 0)));
    }
    let (mut h, mut q) = hessenberg(a);
    let eps = R::epsilon() * R::from_f64(16.0).unwrap();
    let scale = h.frobenius_norm().max(R::one());
    let mut hi = n; // active block is 0..hi
    let mut iters_since_deflation = 0usize;
    let max_total = 60 * n * n + 200;
    let mut total = 0usize;
    while hi > 1 {
        total += 1;
        if total > max_total {
            return Err(Error::Degenerate(
                "QR iteration failed to converge".into(),
            ));
        }
        // deflate tiny subdiagonals
        let mut deflated = false;
        for i in (1..hi).rev() {
            let sub = h[(i, i - 1)].norm();
            let local = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
            let thresh = eps * if local > R::zero() { local } else { scale };
            if sub <= thresh {
                h[(i, i - 1)] = C::<R>::zero();
                if i == hi - 1 {
                    hi -= 1;
                    deflated = true;
                    iters_since_deflation = 0;
                }
            }
        }
        if deflated || hi <= 1 {
            continue;
        }
        // find the start of the active unreduced block
        let mut lo = hi - 1;
        while lo > 0 && !h[(lo, lo - 1)].is_zero() {
            lo -= 1;
        }
        iters_since_deflation += 1;
        // Wilkinson shift from the trailing 2x2 of the active block.
        let sigma = {
            let aa = h[(hi - 2, hi - 2)];
            let bb = h[(hi - 2, hi - 1)];
            let cc = h[(hi - 1, hi - 2)];
            let dd = h[(hi - 1, hi - 1)];
            if iters_since_deflation % 12 == 0 {
                // exceptional shift to break symmetry-induced cycles
                dd + C::<R>::new(cc.norm() + bb.norm(), R::zero())
                    * C::<R>::new(R::from_f64(0.75).unwrap(), R::from_f64(0.34).unwrap())
            } else {
                let tr = aa + dd;
                let det = aa * dd - bb * cc;
                let half = C::<R>::new(R::from_f64(0.5).unwrap(), R::zero());
                let disc = (tr * tr - det.scale(R::from_f64(4.0).unwrap())).sqrt();
                let l1 = (tr + disc) * half;
                let l2 = (tr - disc) * half;
                if (l1 - dd).norm() <= (l2 - dd).norm() {
                    l1
                } else {
                    l2
                }
            }
        };
        // explicit single-shift QR sweep on the block lo..hi
        let m = hi - lo;
        for d in 0..m {
            h[(lo + d, lo + d)] = h[(lo + d, lo + d)] - sigma;
        }
        let mut rots: Vec<(R, C<R>)> = Vec::with_capacity(m - 1);
        for i in lo..hi - 1 {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            // rows i, i+1 of columns lo..n
            for j in lo..n {
                let hi_j = h[(i, j)];
                let hj = h[(i + 1, j)];
                h[(i, j)] = hi_j.scale(c) + s * hj;
                h[(i + 1, j)] = -s.conj() * hi_j + hj.scale(c);
            }
            rots.push((c, s));
        }
        for (idx, (c, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            // columns i, i+1 (rows 0..hi), right-multiplying by G^H
            for r in 0..hi {
                let ci = h[(r, i)];
                let cj = h[(r, i + 1)];
                h[(r, i)] = ci.scale(*c) + cj * s.conj();
                h[(r, i + 1)] = -ci * *s + cj.scale(*c);
            }
            for r in 0..n {
                let ci = q[(r, i)];
                let cj = q[(r, i + 1)];
                q[(r, i)] = ci.scale(*c) + cj * s.conj();
                q[(r, i + 1)] = -ci * *s + cj.scale(*c);
            }
        }
        for d in 0..m {
            h[(lo + d, lo + d)] = h[(lo + d, lo + d)] + sigma;
        }
    }
    // clean the strictly lower part
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = C::<R>::zero();
        }
    }
    Ok((h, q))
}

/// Eigenvalues, in the order they appear on the Schur diagonal.
pub fn eigenvalues<R: Real>(a: &Mat<R>) -> Result<Vec<C<R>>> {
    let (t, _) = schur(a)?;
    Ok((0..a.rows).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues and a matrix of right eigenvectors (columns, unit norm).
pub fn eigen<R: Real>(a: &Mat<R>) -> Result<(Vec<C<R>>, Mat<R>)> {
    let n = a.rows;
    let (t, q) = schur(a)?;
    let lam: Vec<C<R>> = (0..n).map(|i| t[(i, i)]).collect();
    let mut vecs = Mat::zeros(n, n);
    let tiny = R::epsilon() * t.frobenius_norm().max(R::one());
    for k in 0..n {
        // back-substitute (T - lam_k) v = 0 with v_k = 1
        let mut v = vec![C::<R>::zero(); n];
        v[k] = C::<R>::one();
        for j in (0..k).rev() {
            let mut s = C::<R>::zero();
            for l in j + 1..=k {
                s = s + t[(j, l)] * v[l];
            }
            let mut d = t[(j, j)] - lam[k];
            if d.norm() < tiny {
                d = C::<R>::new(tiny, R::zero());
            }
            v[j] = -s / d;
        }
        // rotate back and normalize
        let mut w = vec![C::<R>::zero(); n];
        for i in 0..n {
            for l in 0..n {
                w[i] = w[i] + q[(i, l)] * v[l];
            }
        }
        let norm = w
            .iter()
            .map(|z| z.norm_sqr())
            .fold(R::zero(), |s, x| s + x)
            .sqrt();
        for i in 0..n {
            vecs[(i, k)] = w[i] / C::<R>::new(norm, R::zero());
        }
    }
    Ok((lam, vecs))
}

/// Singular values in decreasing order, by one-sided Jacobi on the columns
/// (accurate for the small singular values, unlike the Gram-matrix route).
pub fn singular_values<R: Real>(a: &Mat<R>) -> Result<Vec<R>> {
    // work on the orientation with fewer columns
    let mut m = if a.cols <= a.rows { a.clone() } else { a.h() };
    let n = m.cols;
    if n == 0 {
        return Ok(Vec::new());
    }
    let eps = R::epsilon() * R::from_f64(8.0).unwrap();
    for _sweep in 0..60 {
        let mut off = R::zero();
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = R::zero();
                let mut beta = R::zero();
                let mut gamma = C::<R>::zero();
                for r in 0..m.rows {
                    let up = m[(r, p)];
                    let vq = m[(r, q)];
                    alpha = alpha + up.norm_sqr();
                    beta = beta + vq.norm_sqr();
                    gamma = gamma + up.conj() * vq;
                }
                let gn = gamma.norm();
                let prod = (alpha * beta).sqrt();
                if gn <= eps * prod || prod == R::zero() {
                    continue;
                }
                off = off.max(gn / prod);
                // rotate columns p, q to kill the off-diagonal Gram entry
                let zeta = (alpha - beta) / (gn + gn);
                let sgn = if zeta < R::zero() { -R::one() } else { R::one() };
                let t = -R::one() / (zeta + sgn * (R::one() + zeta * zeta).sqrt());
                let cs = R::one() / (R::one() + t * t).sqrt();
                let phase = gamma / C::<R>::new(gn, R::zero());
                let s = phase.scale(t * cs);
                for r in 0..m.rows {
                    let up = m[(r, p)];
                    let vq = m[(r, q)];
                    m[(r, p)] = up.scale(cs) - s.conj() * vq;
                    m[(r, q)] = s * up + vq.scale(cs);
                }
            }
        }
        if off <= eps {
            break;
        }
    }
    let mut vals: Vec<R> = (0..n)
        .map(|q| {
            (0..m.rows)
                .map(|r| m[(r, q)].norm_sqr())
                .fold(R::zero(), |s, x| s + x)
                .sqrt()
        })
        .collect();
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(vals)
}

/// Numerical rank with a relative threshold on singular values.
pub fn rank<R: Real>(a: &Mat<R>, rel_tol: R) -> Result<usize> {
    let sv = singular_values(a)?;
    let top = sv.first().copied().unwrap_or(R::zero());
    if top == R::zero() {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * top).count())
}

// --- polynomial utilities -------------------------------------------------
//
// A polynomial is a coefficient vector `c` with `p(z) = sum_i c[i] z^i`.

/// Monic characteristic polynomial coefficients `c[0..=n]`, `c[n] = 1`, via the
/// Faddeev-LeVerrier recursion.
pub fn charpoly<R: Real>(a: &Mat<R>) -> Vec<C<R>> {
    assert!(a.is_square());
    let n = a.rows;
    let mut coeffs = vec![C::<R>::zero(); n + 1];
    coeffs[n] = C::<R>::one();
    // M_1 = A, c_{n-k} = -tr(M_k)/k, M_{k+1} = A (M_k + c_{n-k} I).
    let mut m = a.clone();
    for k in 1..=n {
        let ck = -(m.trace() / C::<R>::new(R::from_usize(k).unwrap(), R::zero()));
        coeffs[n - k] = ck;
        if k < n {
            for i in 0..n {
                m[(i, i)] = m[(i, i)] + ck;
            }
            m = a.mul(&m);
        }
    }
    coeffs
}

/// Evaluates `p` at a scalar.
pub fn poly_eval<R: Real>(p: &[C<R>], z: C<R>) -> C<R> {
    let mut acc = C::<R>::zero();
    for &c in p.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Evaluates `p` at a square matrix.
pub fn poly_eval_mat<R: Real>(p: &[C<R>], a: &Mat<R>) -> Mat<R> {
    let n = a.rows;
    let mut acc = Mat::<R>::zeros(n, n);
    for &c in p.iter().rev() {
        acc = a.mul(&acc);
        for i in 0..n {
            acc[(i, i)] = acc[(i, i)] + c;
        }
    }
    acc
}

/// Monic polynomial with the given roots.
pub fn poly_from_roots<R: Real>(roots: &[C<R>]) -> Vec<C<R>> {
    let mut p = vec![C::<R>::one()];
    for &r in roots {
        let mut q = vec![C::<R>::zero(); p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            q[i + 1] = q[i + 1] + c;
            q[i] = q[i] - r * c;
        }
        p = q;
    }
    p
}

/// Euclidean division `num = quot * den + rem` with `deg(rem) < deg(den)`.
pub fn poly_divrem<R: Real>(num: &[C<R>], den: &[C<R>]) -> Result<(Vec<C<R>>, Vec<C<R>>)> {
    let dd = match den.iter().rposition(|c| !c.is_zero()) {
        Some(d) => d,
        None => return Err(Error::Invalid("division by zero polynomial".into())),
    };
    let lead = den[dd];
    let mut rem: Vec<C<R>> = num.to_vec();
    let nd = rem.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    if nd < dd {
        return Ok((vec![C::<R>::zero()], rem));
    }
    let mut quot = vec![C::<R>::zero(); nd - dd + 1];
    for k in (dd..=nd).rev() {
        let f = rem[k] / lead;
        quot[k - dd] = f;
        for l in 0..=dd {
            rem[k - dd + l] = rem[k - dd + l] - f * den[l];
        }
    }
    rem.truncate(dd.max(1));
    Ok((quot, rem))
}

/// Lagrange interpolation through `(z_i, w_i)`; nodes must be distinct.
#[allow(clippy::needless_range_loop)]
pub fn lagrange_interpolate<R: Real>(points: &[(C<R>, C<R>)]) -> Result<Vec<C<R>>> {
    let n = points.len();
    if n == 0 {
        return Ok(vec![C::<R>::zero()]);
    }
    let mut out = vec![C::<R>::zero(); n];
    for i in 0..n {
        let (zi, wi) = points[i];
        // basis polynomial prod_{j != i} (z - z_j) / (z_i - z_j)
        let mut basis = vec![C::<R>::one()];
        let mut denom = C::<R>::one();
        for j in 0..n {
            if j == i {
                continue;
            }
            let (zj, _) = points[j];
            let d = zi - zj;
            if d.is_zero() {
                return Err(Error::Degenerate("repeated interpolation node".into()));
            }
            denom = denom * d;
            let mut q = vec![C::<R>::zero(); basis.len() + 1];
            for (l, &c) in basis.iter().enumerate() {
                q[l + 1] = q[l + 1] + c;
                q[l] = q[l] - zj * c;
            }
            basis = q;
        }
        let f = wi / denom;
        for (l, c) in basis.iter().enumerate() {
            out[l] = out[l] + f * *c;
        }
    }
    Ok(out)
}
