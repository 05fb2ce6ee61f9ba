//! Matrix representations of the doubled quiver, the evaluation and trace
//! maps from symbols to functions, moment maps, and ADHM data with its gauge
//! action.
//!
//! The sign dictionary between the two matrix conventions is applied exactly
//! once, in [`adhm_from_rep`] / [`rep_from_adhm`]: `i1 = -X1`, `i2 = X2`,
//! `j1 = Y2`, `j2 = Y1`.  With this assignment the first moment component
//! `[A,B] + X1 Y2 - X2 Y1` is literally `[A,B] - i1 j1 - i2 j2`.

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::ncalg::{Arrow, Necklace, PathPoly, PathWord, Vertex};
use crate::{Real, C};

/// A representation of the doubled quiver on `C^k + C^l`:
/// `A, B` are the loop matrices at vertex 1, `X1, X2: C^l -> C^k`,
/// `Y1, Y2: C^k -> C^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuiverRep<R: Real> {
    pub k: usize,
    pub l: usize,
    pub a: Mat<R>,
    pub b: Mat<R>,
    pub x1: Mat<R>,
    pub x2: Mat<R>,
    pub y1: Mat<R>,
    pub y2: Mat<R>,
}

impl<R: Real> QuiverRep<R> {
    pub fn check_shapes(&self) -> Result<()> {
        let (k, l) = (self.k, self.l);
        let ok = self.a.rows == k
            && self.a.cols == k
            && self.b.rows == k
            && self.b.cols == k
            && self.x1.rows == k
            && self.x1.cols == l
            && self.x2.rows == k
            && self.x2.cols == l
            && self.y1.rows == l
            && self.y1.cols == k
            && self.y2.rows == l
            && self.y2.cols == k;
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid("inconsistent shapes in QuiverRep".into()))
        }
    }

    /// The matrix assigned to a single arrow, in its natural (head, tail) shape.
    fn arrow_matrix(&self, w: Arrow) -> &Mat<R> {
        match w {
            Arrow::A => &self.a,
            Arrow::AStar => &self.b,
            Arrow::X => &self.x1,
            Arrow::XStar => &self.y2,
            Arrow::Y => &self.y1,
            Arrow::YStar => &self.x2,
        }
    }

    fn dim(&self, v: Vertex) -> usize {
        match v {
            Vertex::V1 => self.k,
            Vertex::V2 => self.l,
        }
    }
}

fn embed_block<R: Real>(rep: &QuiverRep<R>, m: &Mat<R>, head: Vertex, tail: Vertex) -> Mat<R> {
    let n = rep.k + rep.l;
    let (r0, c0) = (
        match head {
            Vertex::V1 => 0,
            Vertex::V2 => rep.k,
        },
        match tail {
            Vertex::V1 => 0,
            Vertex::V2 => rep.k,
        },
    );
    let mut out = Mat::zeros(n, n);
    out.set_block(r0, c0, m);
    out
}

/// Evaluates a path polynomial as a `(k+l) x (k+l)` block matrix; the algebra
/// homomorphism determined by the arrow dictionary above.
pub fn evaluate<R: Real>(p: &PathPoly, rep: &QuiverRep<R>) -> Result<Mat<R>> {
    rep.check_shapes()?;
    let n = rep.k + rep.l;
    let mut out = Mat::zeros(n, n);
    for (w, coeff) in p.terms() {
        let (re, im) = coeff.to_f64_pair();
        let z = C::<R>::new(
            R::from_f64(re).ok_or_else(|| Error::Invalid("coefficient overflow".into()))?,
            R::from_f64(im).ok_or_else(|| Error::Invalid("coefficient overflow".into()))?,
        );
        let m = match w {
            PathWord::Trivial(v) => {
                let d = rep.dim(*v);
                embed_block(rep, &Mat::identity(d), *v, *v)
            }
            PathWord::Word(arrows) => {
                // right-to-left product of the arrow matrices
                let last = arrows[arrows.len() - 1];
                let mut acc = rep.arrow_matrix(last).clone();
                for a in arrows[..arrows.len() - 1].iter().rev() {
                    acc = rep.arrow_matrix(*a).mul(&acc);
                }
                embed_block(rep, &acc, w.head(), w.tail())
            }
        };
        out = out.add(&m.scale(z));
    }
    Ok(out)
}

/// The pair of block traces of the evaluation of any representative:
/// `(trace over C^k, trace over C^l)`.
pub fn trace_r<R: Real>(f: &Necklace, rep: &QuiverRep<R>) -> Result<(C<R>, C<R>)> {
    let m = evaluate(&f.representative(), rep)?;
    let t1 = m.block(0, 0, rep.k, rep.k).trace();
    let t2 = m.block(rep.k, rep.k, rep.l, rep.l).trace();
    Ok((t1, t2))
}

/// The moment map `nu = ([A,B] + X1 Y2 - X2 Y1, Y1 X2 - Y2 X1)`.
pub fn moment_nu<R: Real>(rep: &QuiverRep<R>) -> Result<(Mat<R>, Mat<R>)> {
    rep.check_shapes()?;
    let first = rep
        .a
        .commutator(&rep.b)
        .add(&rep.x1.mul(&rep.y2))
        .sub(&rep.x2.mul(&rep.y1));
    let second = rep.y1.mul(&rep.x2).sub(&rep.y2.mul(&rep.x1));
    Ok((first, second))
}

/// ADHM datum `(A, B, i, j)` with `i: C^2 -> C^k` (columns `i1, i2`) and
/// `j: C^k -> C^2` (rows `j1, j2`), at the moment-map level `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdhmData<R: Real> {
    pub k: usize,
    pub a: Mat<R>,
    pub b: Mat<R>,
    pub i: Mat<R>,
    pub j: Mat<R>,
    pub tau: C<R>,
}

impl<R: Real> AdhmData<R> {
    pub fn check_shapes(&self) -> Result<()> {
        let k = self.k;
        let ok = self.a.rows == k
            && self.a.cols == k
            && self.b.rows == k
            && self.b.cols == k
            && self.i.rows == k
            && self.i.cols == 2
            && self.j.rows == 2
            && self.j.cols == k;
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid("inconsistent shapes in AdhmData".into()))
        }
    }

    /// Column `i1` or `i2` as a `k x 1` matrix.
    pub fn i_col(&self, which: usize) -> Mat<R> {
        self.i.block(0, which, self.k, 1)
    }

    /// Row `j1` or `j2` as a `1 x k` matrix.
    pub fn j_row(&self, which: usize) -> Mat<R> {
        self.j.block(which, 0, 1, self.k)
    }

    /// Scale factor for relative tolerances.
    pub fn norm_scale(&self) -> R {
        R::one()
            + self.a.frobenius_norm()
            + self.b.frobenius_norm()
            + self.i.frobenius_norm()
            + self.j.frobenius_norm()
    }
}

/// Converts a quiver representation with `l = 1` into an ADHM datum at level `tau`.
pub fn adhm_from_rep<R: Real>(rep: &QuiverRep<R>, tau: C<R>) -> Result<AdhmData<R>> {
    rep.check_shapes()?;
    if rep.l != 1 {
        return Err(Error::Invalid(format!(
            "adhm_from_rep requires l = 1, got l = {}",
            rep.l
        )));
    }
    let mut i = Mat::zeros(rep.k, 2);
    i.set_block(0, 0, &rep.x1.neg());
    i.set_block(0, 1, &rep.x2);
    let mut j = Mat::zeros(2, rep.k);
    j.set_block(0, 0, &rep.y2);
    j.set_block(1, 0, &rep.y1);
    Ok(AdhmData {
        k: rep.k,
        a: rep.a.clone(),
        b: rep.b.clone(),
        i,
        j,
        tau,
    })
}

/// Inverse of [`adhm_from_rep`].
pub fn rep_from_adhm<R: Real>(d: &AdhmData<R>) -> Result<QuiverRep<R>> {
    d.check_shapes()?;
    Ok(QuiverRep {
        k: d.k,
        l: 1,
        a: d.a.clone(),
        b: d.b.clone(),
        x1: d.i_col(0).neg(),
        x2: d.i_col(1),
        y1: d.j_row(1),
        y2: d.j_row(0),
    })
}

/// `[A,B] - i j - tau I`.
pub fn moment_residual<R: Real>(d: &AdhmData<R>) -> Result<Mat<R>> {
    d.check_shapes()?;
    let mut r = d.a.commutator(&d.b).sub(&d.i.mul(&d.j));
    for p in 0..d.k {
        r[(p, p)] = r[(p, p)] - d.tau;
    }
    Ok(r)
}

/// Frobenius norm of the moment residual.
pub fn residual_norm<R: Real>(d: &AdhmData<R>) -> Result<R> {
    Ok(moment_residual(d)?.frobenius_norm())
}

/// Requires the datum to be on-shell within `tol * norm_scale`.
pub fn require_on_shell<R: Real>(d: &AdhmData<R>, tol: R) -> Result<()> {
    let r = residual_norm(d)?;
    let bound = tol * d.norm_scale();
    if r <= bound {
        Ok(())
    } else {
        Err(Error::OffShell {
            residual: r.to_f64().unwrap_or(f64::NAN),
            tol: bound.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// The `GL(k)` gauge action `(g A g^{-1}, g B g^{-1}, g i, j g^{-1})`.
pub fn gauge_act<R: Real>(g: &Mat<R>, d: &AdhmData<R>) -> Result<AdhmData<R>> {
    d.check_shapes()?;
    if g.rows != d.k || g.cols != d.k {
        return Err(Error::Invalid("gauge matrix has the wrong size".into()));
    }
    let ginv = g.inverse()?;
    Ok(AdhmData {
        k: d.k,
        a: g.mul(&d.a).mul(&ginv),
        b: g.mul(&d.b).mul(&ginv),
        i: g.mul(&d.i),
        j: d.j.mul(&ginv),
        tau: d.tau,
    })
}

/// Default maximum degree for the orbit-separating invariant words.
pub const INVARIANT_DEGREE: usize = 6;

/// Closed cyclic words up to a degree bound, deduplicated up to rotation.
fn closed_words(max_deg: usize) -> Vec<Vec<Arrow>> {
    fn min_rot(w: &[Arrow]) -> Vec<Arrow> {
        let n = w.len();
        let mut best: Option<Vec<Arrow>> = None;
        for s in 0..n {
            let mut r = Vec::with_capacity(n);
            r.extend_from_slice(&w[s..]);
            r.extend_from_slice(&w[..s]);
            if best.as_ref().map_or(true, |b| r < *b) {
                best = Some(r);
            }
        }
        best.unwrap()
    }
    let mut out: std::collections::BTreeSet<Vec<Arrow>> = Default::default();
    // DFS over composable words; keep the closed ones.
    fn dfs(
        word: &mut Vec<Arrow>,
        max_deg: usize,
        out: &mut std::collections::BTreeSet<Vec<Arrow>>,
        min_rot: &dyn Fn(&[Arrow]) -> Vec<Arrow>,
    ) {
        if let (Some(&first), Some(&last)) = (word.first(), word.last()) {
            if first.head() == last.tail() {
                out.insert(min_rot(word));
            }
        }
        if word.len() == max_deg {
            return;
        }
        for a in Arrow::ALL {
            let ok = match word.last() {
                None => true,
                Some(&prev) => prev.tail() == a.head(),
            };
            if ok {
                word.push(a);
                dfs(word, max_deg, out, min_rot);
                word.pop();
            }
        }
    }
    let mut word = Vec::new();
    dfs(&mut word, max_deg, &mut out, &|w| min_rot(w));
    out.into_iter().collect()
}

static INVARIANT_WORDS: Lazy<Vec<Vec<Arrow>>> = Lazy::new(|| closed_words(INVARIANT_DEGREE));

/// Trace invariants of the underlying representation on the fixed list of
/// closed words; gauge-invariant, and for `tau != 0` separating in practice.
pub fn invariant_vector<R: Real>(d: &AdhmData<R>) -> Result<Vec<C<R>>> {
    let rep = rep_from_adhm(d)?;
    let mut out = Vec::with_capacity(INVARIANT_WORDS.len());
    for w in INVARIANT_WORDS.iter() {
        let p = PathPoly::word(w);
        let m = evaluate(&p, &rep)?;
        out.push(m.trace());
    }
    Ok(out)
}

/// Orbit equality through trace invariants, with a scale-relative tolerance.
pub fn points_equal<R: Real>(d1: &AdhmData<R>, d2: &AdhmData<R>, tol: R) -> Result<bool> {
    if d1.k != d2.k {
        return Ok(false);
    }
    let v1 = invariant_vector(d1)?;
    let v2 = invariant_vector(d2)?;
    let scale = d1.norm_scale().max(d2.norm_scale());
    // words have degree up to INVARIANT_DEGREE, so compare against scale^deg
    let bound = tol * scale.powi(INVARIANT_DEGREE as i32);
    Ok(v1
        .iter()
        .zip(&v2)
        .all(|(x, y)| (*x - *y).norm() <= bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussRat;
    use crate::ncalg::{self, to_necklace};
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_rep(rng: &mut ChaCha12Rng, k: usize, l: usize) -> QuiverRep<f64> {
        let mut m = |r: usize, cc: usize| {
            Mat::from_fn(r, cc, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
        };
        QuiverRep {
            k,
            l,
            a: m(k, k),
            b: m(k, k),
            x1: m(k, l),
            x2: m(k, l),
            y1: m(l, k),
            y2: m(l, k),
        }
    }

    #[test]
    fn evaluate_idempotents_and_squares() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let rep = random_rep(&mut rng, 3, 1);
        let p1 = evaluate(&PathPoly::idempotent(Vertex::V1), &rep).unwrap();
        let mut expect = Mat::zeros(4, 4);
        expect.set_block(0, 0, &Mat::identity(3));
        assert!(p1.sub(&expect).max_abs() < 1e-15);

        // a^2 with nilpotent A
        let mut rep2 = random_rep(&mut rng, 2, 1);
        rep2.a = Mat::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let asq = evaluate(&PathPoly::word(&[Arrow::A, Arrow::A]), &rep2).unwrap();
        assert!(asq.block(0, 0, 2, 2).max_abs() < 1e-15);

        // xy evaluates to X1 Y1 in the (1,1) block
        let xy = evaluate(&PathPoly::word(&[Arrow::X, Arrow::Y]), &rep).unwrap();
        let direct = rep.x1.mul(&rep.y1);
        assert!(xy.block(0, 0, 3, 3).sub(&direct).max_abs() < 1e-13);
    }

    #[test]
    fn evaluation_is_multiplicative() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let rep = random_rep(&mut rng, 3, 2);
        let p = PathPoly::word(&[Arrow::A, Arrow::X])
            .add(&PathPoly::word(&[Arrow::X]).scale(&GaussRat::from_ints(0, 2)));
        let q = PathPoly::word(&[Arrow::Y, Arrow::A]).add(&PathPoly::idempotent(Vertex::V2).neg());
        let lhs = evaluate(&ncalg::path_mul(&p, &q).unwrap(), &rep).unwrap();
        let rhs_p = evaluate(&p, &rep).unwrap();
        let rhs_q = evaluate(&q, &rep).unwrap();
        let err = lhs.sub(&rhs_p.mul(&rhs_q)).max_abs();
        assert!(err < 1e-12, "multiplicativity error {err}");
    }

    #[test]
    fn trace_is_rotation_invariant_and_kills_commutators() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let rep = random_rep(&mut rng, 3, 1);
        let aas = to_necklace(&PathPoly::word(&[Arrow::A, Arrow::AStar]));
        let asa = to_necklace(&PathPoly::word(&[Arrow::AStar, Arrow::A]));
        let t1 = trace_r(&aas, &rep).unwrap();
        let t2 = trace_r(&asa, &rep).unwrap();
        assert!((t1.0 - t2.0).norm() < 1e-12);

        let p = PathPoly::word(&[Arrow::A, Arrow::X, Arrow::Y]);
        let q = PathPoly::word(&[Arrow::AStar]);
        let comm = ncalg::commutator(&p, &q).unwrap();
        let m = evaluate(&comm, &rep).unwrap();
        let tr1 = m.block(0, 0, 3, 3).trace();
        let tr2 = m.block(3, 3, 1, 1).trace();
        assert!(tr1.norm() < 1e-12 && tr2.norm() < 1e-12);

        // class(pi2) traces to (0, l)
        let p2 = to_necklace(&PathPoly::idempotent(Vertex::V2));
        let t = trace_r(&p2, &rep).unwrap();
        assert!(t.0.norm() < 1e-15 && (t.1 - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn moment_nu_scalar_example() {
        // k=l=1, A=2, B=3, X1=1, Y2=1, X2=0, Y1=0 -> (1, -1)
        let one = |v: f64| Mat::from_rows(vec![vec![c(v, 0.0)]]);
        let rep = QuiverRep {
            k: 1,
            l: 1,
            a: one(2.0),
            b: one(3.0),
            x1: one(1.0),
            x2: one(0.0),
            y1: one(0.0),
            y2: one(1.0),
        };
        let (n1, n2) = moment_nu(&rep).unwrap();
        assert!((n1[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((n2[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn moment_nu_traces_cancel() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let rep = random_rep(&mut rng, 4, 2);
        let (n1, n2) = moment_nu(&rep).unwrap();
        assert!((n1.trace() + n2.trace()).norm() < 1e-12);
    }

    #[test]
    fn adhm_round_trip_and_sign_dictionary() {
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let rep = random_rep(&mut rng, 3, 1);
        let d = adhm_from_rep(&rep, c(0.5, 0.0)).unwrap();
        // i1 = -X1
        assert!(d.i_col(0).add(&rep.x1).max_abs() < 1e-15);
        let back = rep_from_adhm(&d).unwrap();
        assert_eq!(back, rep);
        // nu_1 = [A,B] - i1 j1 - i2 j2
        let (n1, _) = moment_nu(&rep).unwrap();
        let direct = d
            .a
            .commutator(&d.b)
            .sub(&d.i_col(0).mul(&d.j_row(0)))
            .sub(&d.i_col(1).mul(&d.j_row(1)));
        assert!(n1.sub(&direct).max_abs() < 1e-13);
        // symbolic cross-check: evaluating the vertex components of c gives nu
        let (_, c1, c2) = ncalg::symplectic_elements();
        let ev1 = evaluate(&c1, &rep).unwrap().block(0, 0, 3, 3);
        let ev2 = evaluate(&c2, &rep).unwrap().block(3, 3, 1, 1);
        let (m1, m2) = moment_nu(&rep).unwrap();
        assert!(ev1.sub(&m1).max_abs() < 1e-12);
        assert!(ev2.sub(&m2).max_abs() < 1e-12);
    }

    #[test]
    fn residual_examples() {
        // k=1, A=B=0, i=(1,1), j=(-1,-1)^T, tau=2 -> residual 0
        let d = AdhmData {
            k: 1,
            a: Mat::zeros(1, 1),
            b: Mat::zeros(1, 1),
            i: Mat::from_rows(vec![vec![c(1.0, 0.0), c(1.0, 0.0)]]),
            j: Mat::from_rows(vec![vec![c(-1.0, 0.0)], vec![c(-1.0, 0.0)]]),
            tau: c(2.0, 0.0),
        };
        assert!(residual_norm(&d).unwrap() < 1e-15);
        require_on_shell(&d, 1e-10).unwrap();

        // trace of residual is -tr(ij) - k tau
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let rep = random_rep(&mut rng, 3, 1);
        let d = adhm_from_rep(&rep, c(0.3, -0.2)).unwrap();
        let r = moment_residual(&d).unwrap();
        let expect = -(d.i.mul(&d.j)).trace() - d.tau.scale(3.0);
        assert!((r.trace() - expect).norm() < 1e-12);
    }

    #[test]
    fn gauge_action_preserves_invariants() {
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        let rep = random_rep(&mut rng, 4, 1);
        let d = adhm_from_rep(&rep, c(1.0, 0.0)).unwrap();
        let g = Mat::from_fn(4, 4, |i, j| {
            c(
                rng.gen_range(-1.0..1.0) + if i == j { 2.0 } else { 0.0 },
                rng.gen_range(-1.0..1.0),
            )
        });
        let dg = gauge_act(&g, &d).unwrap();
        for m in 1..=4 {
            let t1 = d.a.pow(m).trace();
            let t2 = dg.a.pow(m).trace();
            assert!(
                (t1 - t2).norm() < 1e-9 * (1.0 + t1.norm()),
                "tr A^{m} changed"
            );
        }
        // residual conjugates, so its norm stays within the conditioning of g
        assert!(points_equal(&d, &dg, 1e-8).unwrap());
        // identity gauge is the identity
        let id = gauge_act(&Mat::identity(4), &d).unwrap();
        assert!(id.a.sub(&d.a).max_abs() < 1e-15);
    }

    #[test]
    fn points_distinguish_shifted_data() {
        let mut rng = ChaCha12Rng::seed_from_u64(66);
        let rep = random_rep(&mut rng, 2, 1);
        let d = adhm_from_rep(&rep, c(1.0, 0.0)).unwrap();
        let mut d2 = d.clone();
        for p in 0..2 {
            d2.a[(p, p)] = d2.a[(p, p)] + c(1.0, 0.0);
        }
        assert!(!points_equal(&d, &d2, 1e-8).unwrap());
        let rep3 = random_rep(&mut rng, 2, 1);
        let d3 = adhm_from_rep(&rep3, c(1.0, 0.0)).unwrap();
        assert!(!points_equal(&d, &d3, 1e-8).unwrap());
    }

    #[test]
    fn invariant_word_list_is_nontrivial() {
        assert!(INVARIANT_WORDS.iter().all(|w| !w.is_empty()));
        assert!(INVARIANT_WORDS.len() > 20);
        assert!(INVARIANT_WORDS.iter().all(|w| w.len() <= INVARIANT_DEGREE));
    }
}
