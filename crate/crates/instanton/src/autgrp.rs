//! Tame symplectomorphism generators: strictly triangular automorphisms built
//! from two-letter potentials, their opposites, the affine group, the induced
//! action on ADHM data, orbit strata of `ji`, perturbation diagnostics for
//! `tr (ji)^2`, and the constructive normalization into the locus
//! `i2 = 0, j2 = 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::gauss::GaussRat;
use crate::linalg::{self, Mat};
use crate::ncalg::{self, Arrow, PathPoly, PathWord, Vertex};
use crate::rep::{self, AdhmData};
use crate::slice::TOL_SEP;
use crate::{Real, C};

/// Letters of the free algebra used for potentials; `b` abbreviates the loop `xy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    fn name(self) -> &'static str {
        match self {
            Letter::A => "a",
            Letter::B => "b",
        }
    }
}

fn min_rotation(word: &[Letter]) -> Vec<Letter> {
    let n = word.len();
    let mut best: Option<Vec<Letter>> = None;
    for s in 0..n {
        let mut r = Vec::with_capacity(n);
        r.extend_from_slice(&word[s..]);
        r.extend_from_slice(&word[..s]);
        if best.as_ref().map_or(true, |b| r < *b) {
            best = Some(r);
        }
    }
    best.unwrap()
}

/// An exact necklace in the two letters `a` and `b = xy`: cyclic words with
/// Gaussian-rational coefficients, no constant term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Potential {
    terms: BTreeMap<Vec<Letter>, GaussRat>,
}

impl Potential {
    pub fn zero() -> Self {
        Potential::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Letter>, &GaussRat)> {
        self.terms.iter()
    }

    /// Adds `c` times the cyclic class of `word`; empty words (constants) are dropped.
    pub fn add_term(&mut self, word: &[Letter], c: GaussRat) {
        if word.is_empty() || c.is_zero() {
            return;
        }
        let key = min_rotation(word);
        let entry = self.terms.entry(key.clone()).or_insert_with(GaussRat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn monomial(word: &[Letter], c: GaussRat) -> Self {
        let mut p = Potential::zero();
        p.add_term(word, c);
        p
    }

    pub fn add(&self, other: &Potential) -> Potential {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Potential {
        Potential {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c.clone()))
                .collect(),
        }
    }

    /// Cyclic derivative with respect to one letter, landing in open words of
    /// the free algebra (the empty word is the unit).
    pub fn cyclic_derivative(&self, l: Letter) -> BTreeMap<Vec<Letter>, GaussRat> {
        let mut out: BTreeMap<Vec<Letter>, GaussRat> = BTreeMap::new();
        for (word, c) in &self.terms {
            let n = word.len();
            for p in 0..n {
                if word[p] != l {
                    continue;
                }
                let mut comp = Vec::with_capacity(n - 1);
                comp.extend_from_slice(&word[p + 1..]);
                comp.extend_from_slice(&word[..p]);
                let entry = out.entry(comp.clone()).or_insert_with(GaussRat::zero);
                *entry += c.clone();
                if entry.is_zero() {
                    out.remove(&comp);
                }
            }
        }
        out
    }
}

impl fmt::Display for Potential {
    /// One term per line as `coeff * a.b.b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0");
        }
        for (w, c) in &self.terms {
            let word = w.iter().map(|l| l.name()).collect::<Vec<_>>().join(".");
            writeln!(f, "{c} * {word}")?;
        }
        Ok(())
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Potential::zero();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line == "0" {
                continue;
            }
            // a bare word is taken with coefficient 1
            let (coeff_str, word_str) = line.split_once('*').unwrap_or(("1", line));
            let coeff: GaussRat = coeff_str.trim().parse()?;
            let word: Option<Vec<Letter>> = word_str
                .trim()
                .split('.')
                .map(|t| match t.trim() {
                    "a" => Some(Letter::A),
                    "b" => Some(Letter::B),
                    _ => None,
                })
                .collect();
            let word = word.ok_or_else(|| Error::Parse(format!("bad letter in {word_str:?}")))?;
            out.add_term(&word, coeff);
        }
        Ok(out)
    }
}

/// Maps an open two-letter word to a path: `a` is the loop arrow, `b` the loop
/// `xy`; when `starred` the word is reversed with `a -> a*`, `b -> y* x*`
/// (the star anti-automorphism, which fixes the commutator element).
fn letters_to_path(word: &[Letter], starred: bool) -> PathWord {
    let mut arrows = Vec::new();
    if starred {
        for l in word.iter().rev() {
            match l {
                Letter::A => arrows.push(Arrow::AStar),
                Letter::B => {
                    arrows.push(Arrow::YStar);
                    arrows.push(Arrow::XStar);
                }
            }
        }
    } else {
        for l in word {
            match l {
                Letter::A => arrows.push(Arrow::A),
                Letter::B => {
                    arrows.push(Arrow::X);
                    arrows.push(Arrow::Y);
                }
            }
        }
    }
    match PathWord::word(arrows.clone()) {
        Some(w) => w,
        None => PathWord::Trivial(Vertex::V1),
    }
}

fn free_to_path_poly(m: &BTreeMap<Vec<Letter>, GaussRat>, starred: bool) -> PathPoly {
    let mut out = PathPoly::zero();
    for (w, c) in m {
        out.add_term(letters_to_path(w, starred), c.clone());
    }
    out
}

/// Images of the six arrows under the strictly triangular automorphism of `f`:
/// `a, x, y` fixed, `a* += df/da`, `x* += y df/db`, `y* += df/db x`.
pub fn lambda_images(f: &Potential) -> BTreeMap<Arrow, PathPoly> {
    let da = free_to_path_poly(&f.cyclic_derivative(Letter::A), false);
    let db = free_to_path_poly(&f.cyclic_derivative(Letter::B), false);
    let mut out = BTreeMap::new();
    out.insert(Arrow::A, PathPoly::arrow(Arrow::A));
    out.insert(Arrow::X, PathPoly::arrow(Arrow::X));
    out.insert(Arrow::Y, PathPoly::arrow(Arrow::Y));
    out.insert(Arrow::AStar, PathPoly::arrow(Arrow::AStar).add(&da));
    out.insert(
        Arrow::XStar,
        PathPoly::arrow(Arrow::XStar)
            .add(&ncalg::path_mul(&PathPoly::arrow(Arrow::Y), &db).expect("loop product")),
    );
    out.insert(
        Arrow::YStar,
        PathPoly::arrow(Arrow::YStar)
            .add(&ncalg::path_mul(&db, &PathPoly::arrow(Arrow::X)).expect("loop product")),
    );
    out
}

/// Images under the opposite triangular automorphism: starred arrows fixed,
/// unstarred shifted by the star-conjugated derivatives.
pub fn opp_lambda_images(f: &Potential) -> BTreeMap<Arrow, PathPoly> {
    let da = free_to_path_poly(&f.cyclic_derivative(Letter::A), true);
    let db = free_to_path_poly(&f.cyclic_derivative(Letter::B), true);
    let mut out = BTreeMap::new();
    out.insert(Arrow::AStar, PathPoly::arrow(Arrow::AStar));
    out.insert(Arrow::XStar, PathPoly::arrow(Arrow::XStar));
    out.insert(Arrow::YStar, PathPoly::arrow(Arrow::YStar));
    out.insert(Arrow::A, PathPoly::arrow(Arrow::A).add(&da));
    out.insert(
        Arrow::X,
        PathPoly::arrow(Arrow::X)
            .add(&ncalg::path_mul(&db, &PathPoly::arrow(Arrow::YStar)).expect("loop product")),
    );
    out.insert(
        Arrow::Y,
        PathPoly::arrow(Arrow::Y)
            .add(&ncalg::path_mul(&PathPoly::arrow(Arrow::XStar), &db).expect("loop product")),
    );
    out
}

/// Applies an arrow substitution to a path polynomial; trivial paths are fixed.
pub fn substitute(p: &PathPoly, images: &BTreeMap<Arrow, PathPoly>) -> Result<PathPoly> {
    let mut out = PathPoly::zero();
    for (w, c) in p.terms() {
        let term = match w {
            PathWord::Trivial(v) => PathPoly::idempotent(*v),
            PathWord::Word(arrows) => {
                let mut acc: Option<PathPoly> = None;
                for a in arrows {
                    let img = images
                        .get(a)
                        .ok_or_else(|| Error::Invalid(format!("no image for arrow {}", a.name())))?;
                    acc = Some(match acc {
                        None => img.clone(),
                        Some(prev) => ncalg::path_mul(&prev, img)?,
                    });
                }
                acc.unwrap()
            }
        };
        out = out.add(&term.scale(c));
    }
    Ok(out)
}

/// Exact check that an endomorphism given by arrow images fixes the element
/// `[a,a*] + [x,x*] + [y,y*]`.
pub fn check_preserves_c(images: &BTreeMap<Arrow, PathPoly>) -> Result<bool> {
    for (a, img) in images {
        for (w, _) in img.terms() {
            if w.head() != a.head() || w.tail() != a.tail() {
                return Err(Error::Endpoints(format!(
                    "image of {} contains a path {:?} with different endpoints",
                    a.name(),
                    w
                )));
            }
        }
    }
    let (c, _, _) = ncalg::symplectic_elements();
    let image = substitute(&c, images)?;
    Ok(image.sub(&c).is_zero())
}

/// A generator of the tame symplectomorphism group, plus the bookkeeping
/// moves needed to make normalization words replayable: a numeric triangular
/// generator (potential `-p(a) b` with arbitrary complex coefficients, acting
/// in closed form) and gauge conjugations.
#[derive(Debug, Clone, PartialEq)]
pub enum TameGenerator<R: Real> {
    Triangular(Potential),
    OppTriangular(Potential),
    UnimodularAffine { s: [[C<R>; 2]; 2], t: [C<R>; 2] },
    Gl2([[C<R>; 2]; 2]),
    /// Strictly triangular with `f = -p(a) b`, `p` given by coefficients.
    TriangularPoly(Vec<C<R>>),
    Gauge(Mat<R>),
}

impl<R: Real> TameGenerator<R> {
    pub fn inverse(&self) -> Result<TameGenerator<R>> {
        Ok(match self {
            TameGenerator::Triangular(f) => TameGenerator::Triangular(f.neg()),
            TameGenerator::OppTriangular(f) => TameGenerator::OppTriangular(f.neg()),
            TameGenerator::TriangularPoly(p) => {
                TameGenerator::TriangularPoly(p.iter().map(|z| -*z).collect())
            }
            TameGenerator::UnimodularAffine { s, t } => {
                let sinv = invert_2x2(s)?;
                let t2 = [
                    -(sinv[0][0] * t[0] + sinv[0][1] * t[1]),
                    -(sinv[1][0] * t[0] + sinv[1][1] * t[1]),
                ];
                TameGenerator::UnimodularAffine { s: sinv, t: t2 }
            }
            TameGenerator::Gl2(t) => TameGenerator::Gl2(invert_2x2(t)?),
            TameGenerator::Gauge(g) => TameGenerator::Gauge(g.inverse()?),
        })
    }
}

fn invert_2x2<R: Real>(m: &[[C<R>; 2]; 2]) -> Result<[[C<R>; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.norm() < R::from_f64(1e-14).unwrap() {
        return Err(Error::Singular("2x2 generator matrix".into()));
    }
    Ok([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

fn mat_2x2<R: Real>(m: &[[C<R>; 2]; 2]) -> Mat<R> {
    Mat::from_rows(vec![vec![m[0][0], m[0][1]], vec![m[1][0], m[1][1]]])
}

/// Extracts the matrix of one arrow image after symbolic evaluation.
fn eval_arrow_image<R: Real>(
    img: &PathPoly,
    a: Arrow,
    r: &rep::QuiverRep<R>,
) -> Result<Mat<R>> {
    let full = rep::evaluate(img, r)?;
    let offset = |v: Vertex| match v {
        Vertex::V1 => 0,
        Vertex::V2 => r.k,
    };
    let dim = |v: Vertex| match v {
        Vertex::V1 => r.k,
        Vertex::V2 => r.l,
    };
    Ok(full.block(
        offset(a.head()),
        offset(a.tail()),
        dim(a.head()),
        dim(a.tail()),
    ))
}

fn act_images<R: Real>(
    images: &BTreeMap<Arrow, PathPoly>,
    d: &AdhmData<R>,
) -> Result<AdhmData<R>> {
    let r = rep::rep_from_adhm(d)?;
    let new = rep::QuiverRep {
        k: r.k,
        l: r.l,
        a: eval_arrow_image(&images[&Arrow::A], Arrow::A, &r)?,
        b: eval_arrow_image(&images[&Arrow::AStar], Arrow::AStar, &r)?,
        x1: eval_arrow_image(&images[&Arrow::X], Arrow::X, &r)?,
        x2: eval_arrow_image(&images[&Arrow::YStar], Arrow::YStar, &r)?,
        y1: eval_arrow_image(&images[&Arrow::Y], Arrow::Y, &r)?,
        y2: eval_arrow_image(&images[&Arrow::XStar], Arrow::XStar, &r)?,
    };
    rep::adhm_from_rep(&new, d.tau)
}

/// Action of a tame generator on on-shell ADHM data.  Triangular generators
/// act by symbolic image evaluation through the representation; the numeric
/// triangular generator and the affine moves act in closed form.
pub fn act<R: Real>(gen: &TameGenerator<R>, d: &AdhmData<R>) -> Result<AdhmData<R>> {
    rep::require_on_shell(d, R::from_f64(1e-6).unwrap())?;
    match gen {
        TameGenerator::Triangular(f) => act_images(&lambda_images(f), d),
        TameGenerator::OppTriangular(f) => act_images(&opp_lambda_images(f), d),
        TameGenerator::TriangularPoly(p) => {
            let pa = linalg::poly_eval_mat(p, &d.a);
            let i1 = d.i_col(0);
            let j2 = d.j_row(1);
            let mut i = d.i.clone();
            i.set_block(0, 1, &d.i_col(1).add(&pa.mul(&i1)));
            let mut j = d.j.clone();
            j.set_block(0, 0, &d.j_row(0).sub(&j2.mul(&pa)));
            // the loop dual also moves, by the a-derivative of -p(a) x y:
            // B += sum_m p_m sum_{r<m} A^{m-1-r} (i1 j2) A^r
            let mut b = d.b.clone();
            let core = i1.mul(&j2);
            let mut pow = Vec::with_capacity(p.len());
            pow.push(Mat::identity(d.k));
            for _ in 1..p.len() {
                pow.push(pow.last().unwrap().mul(&d.a));
            }
            for (m, pm) in p.iter().enumerate() {
                for r in 0..m {
                    b = b.add(&pow[m - 1 - r].mul(&core).mul(&pow[r]).scale(*pm));
                }
            }
            Ok(AdhmData {
                k: d.k,
                a: d.a.clone(),
                b,
                i,
                j,
                tau: d.tau,
            })
        }
        TameGenerator::UnimodularAffine { s, t } => {
            let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
            if (det - C::<R>::one()).norm() > R::from_f64(1e-10).unwrap() {
                return Err(Error::Invalid("affine part must be unimodular".into()));
            }
            let a = d
                .a
                .scale(s[0][0])
                .add(&d.b.scale(s[0][1]))
                .add(&Mat::scalar(d.k, t[0]));
            let b = d
                .a
                .scale(s[1][0])
                .add(&d.b.scale(s[1][1]))
                .add(&Mat::scalar(d.k, t[1]));
            Ok(AdhmData {
                k: d.k,
                a,
                b,
                i: d.i.clone(),
                j: d.j.clone(),
                tau: d.tau,
            })
        }
        TameGenerator::Gl2(tm) => {
            let t = mat_2x2(tm);
            let tinv = mat_2x2(&invert_2x2(tm)?);
            Ok(AdhmData {
                k: d.k,
                a: d.a.clone(),
                b: d.b.clone(),
                i: d.i.mul(&t.t()),
                j: tinv.t().mul(&d.j),
                tau: d.tau,
            })
        }
        TameGenerator::Gauge(g) => rep::gauge_act(g, d),
    }
}

/// Applies a word of generators left to right.
pub fn act_word<R: Real>(word: &[TameGenerator<R>], d: &AdhmData<R>) -> Result<AdhmData<R>> {
    let mut cur = d.clone();
    for g in word {
        cur = act(g, &cur)?;
    }
    Ok(cur)
}

/// The `2k x 2k` matrix `[[i1 j1, i1 j2], [i2 j1, i2 j2]]`, whose conjugacy
/// class is preserved by every tame generator.
pub fn e_image<R: Real>(d: &AdhmData<R>) -> Mat<R> {
    let i1 = d.i_col(0);
    let i2 = d.i_col(1);
    let j1 = d.j_row(0);
    let j2 = d.j_row(1);
    Mat::block2x2(
        &i1.mul(&j1),
        &i1.mul(&j2),
        &i2.mul(&j1),
        &i2.mul(&j2),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StratumKind {
    /// `ji` diagonalizable: orbit of `diag(alpha1, alpha2, 0, ..., 0)`.
    Diagonalizable,
    /// `ji` a nontrivial Jordan block: orbit of `E_12 + diag(alpha, alpha, 0, ...)`.
    NilpotentPlusScalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stratum<R: Real> {
    pub kind: StratumKind,
    pub alpha: (C<R>, C<R>),
    pub is_n1: bool,
}

/// Classifies the orbit of `ji` for `tau != 0`: its eigenvalues satisfy
/// `alpha1 + alpha2 = -k tau`, and `tr (ji)^2 = k^2 tau^2` picks out the
/// rank-one stratum.
pub fn stratum<R: Real>(d: &AdhmData<R>, tol: R) -> Result<Stratum<R>> {
    if d.tau.is_zero() {
        return Err(Error::Invalid("stratum classification requires tau != 0".into()));
    }
    rep::require_on_shell(d, R::from_f64(1e-6).unwrap())?;
    let ji = d.j.mul(&d.i);
    let scale = R::one() + ji.max_abs();
    // eigenvalues of the 2x2 matrix by the quadratic formula
    let tr = ji.trace();
    let det = ji[(0, 0)] * ji[(1, 1)] - ji[(0, 1)] * ji[(1, 0)];
    let half = C::<R>::new(R::from_f64(0.5).unwrap(), R::zero());
    let four = C::<R>::new(R::from_f64(4.0).unwrap(), R::zero());
    let disc = (tr * tr - four * det).sqrt();
    let e1 = (tr + disc) * half;
    let e2 = (tr - disc) * half;
    let off = ji[(0, 1)].norm().max(ji[(1, 0)].norm());
    let diagonalizable = (e1 - e2).norm() > tol * scale
        || ((ji[(0, 0)] - ji[(1, 1)]).norm() <= tol * scale && off <= tol * scale);
    let ktau = C::<R>::new(R::from_f64(d.k as f64).unwrap(), R::zero()) * d.tau;
    let tr_sq = ji.mul(&ji).trace();
    let is_n1 = (tr_sq - ktau * ktau).norm() <= tol * scale * scale;
    Ok(if diagonalizable {
        Stratum {
            kind: StratumKind::Diagonalizable,
            alpha: (e1, e2),
            is_n1,
        }
    } else {
        let alpha = (e1 + e2) * half;
        Stratum {
            kind: StratumKind::NilpotentPlusScalar,
            alpha: (alpha, alpha),
            is_n1,
        }
    })
}

fn scalar_of<R: Real>(m: &Mat<R>) -> C<R> {
    m[(0, 0)]
}

/// First- and second-order coefficients of `s -> tr (j(s) i(s))^2` under the
/// triangular flow of `f = s a b`:
/// `2 (j1 i1 - j2 i2) j2 A i1 + 2 j2 i1 (j2 A i2 - j1 A i1)` and
/// `2 (j2 A i1)^2 - 2 j2 i1 j2 A^2 i1`.
pub fn tr_ji_sq_perturbation<R: Real>(d: &AdhmData<R>) -> Result<(C<R>, C<R>)> {
    d.check_shapes()?;
    let i1 = d.i_col(0);
    let i2 = d.i_col(1);
    let j1 = d.j_row(0);
    let j2 = d.j_row(1);
    let two = C::<R>::new(R::from_f64(2.0).unwrap(), R::zero());
    let j1i1 = scalar_of(&j1.mul(&i1));
    let j2i2 = scalar_of(&j2.mul(&i2));
    let j2i1 = scalar_of(&j2.mul(&i1));
    let j2ai1 = scalar_of(&j2.mul(&d.a).mul(&i1));
    let j2ai2 = scalar_of(&j2.mul(&d.a).mul(&i2));
    let j1ai1 = scalar_of(&j1.mul(&d.a).mul(&i1));
    let j2aai1 = scalar_of(&j2.mul(&d.a).mul(&d.a).mul(&i1));
    let linear = two * (j1i1 - j2i2) * j2ai1 + two * j2i1 * (j2ai2 - j1ai1);
    let quadratic = two * j2ai1 * j2ai1 - two * j2i1 * j2aai1;
    Ok((linear, quadratic))
}

/// Randomized search for a small polynomial `p` with `C + p(D)` regular
/// semisimple; exists whenever `[C, D] - tau` has rank one and `tau != 0`.
pub fn shiota_search<R: Real>(
    cmat: &Mat<R>,
    dmat: &Mat<R>,
    tau: C<R>,
    epsilon: R,
    seed: u64,
) -> Result<Vec<C<R>>> {
    if tau.is_zero() {
        return Err(Error::Invalid("shiota_search requires tau != 0".into()));
    }
    let n = cmat.rows;
    let comm = cmat.commutator(dmat).sub(&Mat::scalar(n, tau));
    let r = linalg::rank(&comm, R::from_f64(1e-9).unwrap())?;
    if r != 1 {
        return Err(Error::Invalid(format!(
            "rank of [C,D] - tau is {r}, expected 1"
        )));
    }
    let sep_tol = R::from_f64(TOL_SEP).unwrap();
    let is_reg_ss = |p: &[C<R>]| -> Result<bool> {
        let m = cmat.add(&linalg::poly_eval_mat(p, dmat));
        let lam = linalg::eigenvalues(&m)?;
        let scale = lam
            .iter()
            .fold(R::one(), |s, z| s.max(z.norm()));
        for a in 0..n {
            for b in a + 1..n {
                if (lam[a] - lam[b]).norm() <= sep_tol * scale {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    if is_reg_ss(&[])? {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x53_48_49_4f_54_41_u64);
    let mut scale = epsilon;
    for _halving in 0..8 {
        for _try in 0..1000 {
            let mut p: Vec<C<R>> = (0..n)
                .map(|_| {
                    C::<R>::new(
                        R::from_f64(rng.gen_range(-1.0..1.0)).unwrap(),
                        R::from_f64(rng.gen_range(-1.0..1.0)).unwrap(),
                    )
                })
                .collect();
            let norm = p.iter().fold(R::zero(), |s, z| s + z.norm_sqr()).sqrt();
            let factor = scale / (R::one() + norm);
            for z in &mut p {
                *z = z.scale(factor);
            }
            if is_reg_ss(&p)? {
                return Ok(p);
            }
        }
        scale = scale * R::from_f64(0.5).unwrap();
    }
    Err(Error::SearchExhausted(
        "no regular-semisimple perturbation found within budget".into(),
    ))
}

/// Moves an on-shell point with regular semisimple `A` into the locus
/// `i2 = 0, j2 = 0` (the Calogero-Moser form), returning the replayable
/// generator word together with the normalized point.
pub fn normalize_to_cm<R: Real>(
    d: &AdhmData<R>,
    seed: u64,
) -> Result<(Vec<TameGenerator<R>>, AdhmData<R>)> {
    if d.tau.is_zero() {
        return Err(Error::Invalid("normalization requires tau != 0".into()));
    }
    rep::require_on_shell(d, R::from_f64(1e-6).unwrap())?;
    let k = d.k;
    let scale = d.norm_scale();
    let small = R::from_f64(1e-9).unwrap() * scale;
    if d.i_col(1).max_abs() <= small && d.j_row(1).max_abs() <= small {
        return Ok((Vec::new(), d.clone()));
    }
    let mut word: Vec<TameGenerator<R>> = Vec::new();
    let mut cur = d.clone();

    // 1. diagonalize A
    let (lam, vecs) = linalg::eigen(&cur.a)?;
    let lam_scale = lam.iter().fold(R::one(), |s, z| s.max(z.norm()));
    for p in 0..k {
        for q in p + 1..k {
            if (lam[p] - lam[q]).norm() <= R::from_f64(TOL_SEP).unwrap() * lam_scale {
                return Err(Error::Degenerate(
                    "A is not regular semisimple within tolerance".into(),
                ));
            }
        }
    }
    let g = vecs.inverse()?;
    word.push(TameGenerator::Gauge(g.clone()));
    cur = rep::gauge_act(&g, &cur)?;

    // 2. rotate i so that every entry of the first column is well away from zero
    let floor = R::from_f64(1e-6).unwrap() * (R::one() + cur.i.frobenius_norm());
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x4e_4f_52_4d_u64);
    let mut rotated = false;
    for attempt in 0..100 {
        if cur.i_col(0).col(0).iter().all(|z| z.norm() > floor) {
            rotated = true;
            break;
        }
        let _ = attempt;
        let raw: [[C<R>; 2]; 2] = [
            [rand_unit(&mut rng), rand_unit(&mut rng)],
            [rand_unit(&mut rng), rand_unit(&mut rng)],
        ];
        let det = raw[0][0] * raw[1][1] - raw[0][1] * raw[1][0];
        if det.norm() < R::from_f64(0.05).unwrap() {
            continue;
        }
        let root = det.sqrt();
        let s = [
            [raw[0][0] / root, raw[0][1] / root],
            [raw[1][0] / root, raw[1][1] / root],
        ];
        let gen = TameGenerator::Gl2(s);
        cur = act(&gen, &cur)?;
        word.push(gen);
    }
    if !rotated {
        return Err(Error::Degenerate(
            "could not make the first column of i nonvanishing".into(),
        ));
    }

    // 3. kill i2 with p(lambda_t) = -i2[t] / i1[t]
    let pts: Vec<(C<R>, C<R>)> = (0..k)
        .map(|t| (cur.a[(t, t)], -cur.i[(t, 1)] / cur.i[(t, 0)]))
        .collect();
    let p1 = linalg::lagrange_interpolate(&pts)?;
    let gen = TameGenerator::TriangularPoly(p1);
    cur = act(&gen, &cur)?;
    word.push(gen);

    // 4. swap the two framing directions
    let swap: [[C<R>; 2]; 2] = [
        [C::<R>::zero(), C::<R>::one()],
        [C::<R>::one(), C::<R>::zero()],
    ];
    let gen = TameGenerator::Gl2(swap);
    cur = act(&gen, &cur)?;
    word.push(gen);

    // 5. kill the remaining row: now i1 = 0 and every entry of j2 is nonzero
    for t in 0..k {
        if cur.j[(1, t)].norm() <= R::from_f64(1e-9).unwrap() * (R::one() + cur.j.frobenius_norm())
        {
            return Err(Error::Degenerate(format!(
                "entry {t} of the second row of j vanished during normalization"
            )));
        }
    }
    let pts: Vec<(C<R>, C<R>)> = (0..k)
        .map(|t| (cur.a[(t, t)], cur.j[(0, t)] / cur.j[(1, t)]))
        .collect();
    let p2 = linalg::lagrange_interpolate(&pts)?;
    let gen = TameGenerator::TriangularPoly(p2);
    cur = act(&gen, &cur)?;
    word.push(gen);

    // 6. swap back into i2 = 0, j2 = 0
    let gen = TameGenerator::Gl2(swap);
    cur = act(&gen, &cur)?;
    word.push(gen);

    let out_scale = cur.norm_scale();
    let bound = R::from_f64(1e-9).unwrap() * out_scale;
    if cur.i_col(1).max_abs() > bound || cur.j_row(1).max_abs() > bound {
        return Err(Error::Degenerate(
            "normalization failed to reach i2 = 0, j2 = 0".into(),
        ));
    }
    rep::require_on_shell(&cur, R::from_f64(1e-8).unwrap())?;
    Ok((word, cur))
}

fn rand_unit<R: Real>(rng: &mut ChaCha12Rng) -> C<R> {
    C::<R>::new(
        R::from_f64(rng.gen_range(-1.0..1.0)).unwrap(),
        R::from_f64(rng.gen_range(-1.0..1.0)).unwrap(),
    )
}
