//! Exact symbolic arithmetic in the path algebra of the doubled instanton quiver,
//! the necklace Lie bracket, and the distinguished symplectic elements.
//!
//! The quiver has two vertices, a loop `a` at vertex 1, `x: 2 -> 1` and
//! `y: 1 -> 2`; the double adds a reversed arrow `z*` for each `z`.  Paths are
//! written from right to left, i.e. in the word `w1 w2` the arrow `w2` is
//! applied first, so consecutive arrows must satisfy `tail(w_i) = head(w_{i+1})`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gauss::GaussRat;

/// Maximum path degree accepted by symbolic operations.
pub const DEGREE_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    V1,
    V2,
}

/// Non-trivial arrows of the doubled quiver, in canonical order a < a* < x < x* < y < y*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arrow {
    A,
    AStar,
    X,
    XStar,
    Y,
    YStar,
}

impl Arrow {
    pub const ALL: [Arrow; 6] = [
        Arrow::A,
        Arrow::AStar,
        Arrow::X,
        Arrow::XStar,
        Arrow::Y,
        Arrow::YStar,
    ];

    /// Source vertex (the arrow maps tail -> head).
    pub fn tail(self) -> Vertex {
        match self {
            Arrow::A | Arrow::AStar => Vertex::V1,
            Arrow::X => Vertex::V2,
            Arrow::XStar => Vertex::V1,
            Arrow::Y => Vertex::V1,
            Arrow::YStar => Vertex::V2,
        }
    }

    pub fn head(self) -> Vertex {
        match self {
            Arrow::A | Arrow::AStar => Vertex::V1,
            Arrow::X => Vertex::V1,
            Arrow::XStar => Vertex::V2,
            Arrow::Y => Vertex::V2,
            Arrow::YStar => Vertex::V1,
        }
    }

    pub fn star(self) -> Arrow {
        match self {
            Arrow::A => Arrow::AStar,
            Arrow::AStar => Arrow::A,
            Arrow::X => Arrow::XStar,
            Arrow::XStar => Arrow::X,
            Arrow::Y => Arrow::YStar,
            Arrow::YStar => Arrow::Y,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Arrow::A => "a",
            Arrow::AStar => "a+",
            Arrow::X => "x",
            Arrow::XStar => "x+",
            Arrow::Y => "y",
            Arrow::YStar => "y+",
        }
    }

    pub fn from_name(s: &str) -> Option<Arrow> {
        Some(match s {
            "a" => Arrow::A,
            "a+" => Arrow::AStar,
            "x" => Arrow::X,
            "x+" => Arrow::XStar,
            "y" => Arrow::Y,
            "y+" => Arrow::YStar,
            _ => return None,
        })
    }
}

/// A basis path: either a trivial path at a vertex or a composable word of arrows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathWord {
    Trivial(Vertex),
    Word(Vec<Arrow>),
}

impl PathWord {
    /// Checks composability of a non-empty word.
    pub fn word(arrows: Vec<Arrow>) -> Option<PathWord> {
        if arrows.is_empty() {
            return None;
        }
        for w in arrows.windows(2) {
            if w[0].tail() != w[1].head() {
                return None;
            }
        }
        Some(PathWord::Word(arrows))
    }

    pub fn degree(&self) -> usize {
        match self {
            PathWord::Trivial(_) => 0,
            PathWord::Word(w) => w.len(),
        }
    }

    pub fn head(&self) -> Vertex {
        match self {
            PathWord::Trivial(v) => *v,
            PathWord::Word(w) => w[0].head(),
        }
    }

    pub fn tail(&self) -> Vertex {
        match self {
            PathWord::Trivial(v) => *v,
            PathWord::Word(w) => w[w.len() - 1].tail(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.head() == self.tail()
    }

    /// Concatenation `self . other` (apply `other` first); `None` if the
    /// endpoints do not match.
    pub fn compose(&self, other: &PathWord) -> Option<PathWord> {
        if self.tail() != other.head() {
            return None;
        }
        match (self, other) {
            (PathWord::Trivial(_), q) => Some(q.clone()),
            (p, PathWord::Trivial(_)) => Some(p.clone()),
            (PathWord::Word(p), PathWord::Word(q)) => {
                let mut w = p.clone();
                w.extend_from_slice(q);
                Some(PathWord::Word(w))
            }
        }
    }
}

/// A finite linear combination of paths with exact Gaussian-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathPoly {
    terms: BTreeMap<PathWord, GaussRat>,
}

impl PathPoly {
    pub fn zero() -> Self {
        PathPoly::default()
    }

    pub fn idempotent(v: Vertex) -> Self {
        PathPoly::monomial(PathWord::Trivial(v), GaussRat::from_int(1))
    }

    pub fn arrow(a: Arrow) -> Self {
        PathPoly::monomial(PathWord::Word(vec![a]), GaussRat::from_int(1))
    }

    /// A single word of arrows; panics on a non-composable word (programming error).
    pub fn word(arrows: &[Arrow]) -> Self {
        let w = PathWord::word(arrows.to_vec()).expect("non-composable word");
        PathPoly::monomial(w, GaussRat::from_int(1))
    }

    pub fn monomial(w: PathWord, c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        PathPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PathWord, &GaussRat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: PathWord, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_insert_with(GaussRat::zero);
        *entry += c;
        // Re-borrow to drop the zero if it cancelled.
        let keys: Vec<_> = self
            .terms
            .iter()
            .filter(|(_, c)| c.is_zero())
            .map(|(k, _)| k.clone())
            .collect();
        for k in keys {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, other: &PathPoly) -> PathPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> PathPoly {
        PathPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &PathPoly) -> PathPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &GaussRat) -> PathPoly {
        let mut out = PathPoly::zero();
        for (w, k) in &self.terms {
            out.add_term(w.clone(), c.clone() * k.clone());
        }
        out
    }

    fn check_cap(&self) -> Result<()> {
        let d = self.degree();
        if d > DEGREE_CAP {
            return Err(Error::DegreeCap(d, DEGREE_CAP));
        }
        Ok(())
    }
}

/// Concatenation product; non-composable concatenations vanish.
pub fn path_mul(p: &PathPoly, q: &PathPoly) -> Result<PathPoly> {
    p.check_cap()?;
    q.check_cap()?;
    let mut out = PathPoly::zero();
    for (wp, cp) in p.terms() {
        for (wq, cq) in q.terms() {
            if let Some(w) = wp.compose(wq) {
                out.add_term(w, cp.clone() * cq.clone());
            }
        }
    }
    Ok(out)
}

/// `[p, q] = pq - qp`.
pub fn commutator(p: &PathPoly, q: &PathPoly) -> Result<PathPoly> {
    Ok(path_mul(p, q)?.sub(&path_mul(q, p)?))
}

/// Cyclic-word classes: a trivial class per vertex and closed words up to rotation,
/// stored by their lexicographically minimal rotation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NecklaceWord {
    Idem(Vertex),
    Cyc(Vec<Arrow>),
}

impl NecklaceWord {
    pub fn degree(&self) -> usize {
        match self {
            NecklaceWord::Idem(_) => 0,
            NecklaceWord::Cyc(w) => w.len(),
        }
    }
}

fn min_rotation(word: &[Arrow]) -> Vec<Arrow> {
    let n = word.len();
    let mut best: Option<Vec<Arrow>> = None;
    for i in 0..n {
        let mut rot = Vec::with_capacity(n);
        rot.extend_from_slice(&word[i..]);
        rot.extend_from_slice(&word[..i]);
        // Only rotations that are themselves composable words survive; for a
        // closed word every rotation is composable.
        match &best {
            None => best = Some(rot),
            Some(b) if rot < *b => best = Some(rot),
            _ => {}
        }
    }
    best.unwrap()
}

/// An element of the necklace Lie algebra: paths modulo cyclic permutation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Necklace {
    terms: BTreeMap<NecklaceWord, GaussRat>,
}

impl Necklace {
    pub fn zero() -> Self {
        Necklace::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NecklaceWord, &GaussRat)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: NecklaceWord, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(GaussRat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &Necklace) -> Necklace {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Necklace {
        Necklace {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Necklace) -> Necklace {
        self.add(&other.neg())
    }

    /// A path-polynomial representative (the canonical rotation of each class).
    pub fn representative(&self) -> PathPoly {
        let mut out = PathPoly::zero();
        for (w, c) in &self.terms {
            let pw = match w {
                NecklaceWord::Idem(v) => PathWord::Trivial(*v),
                NecklaceWord::Cyc(word) => PathWord::Word(word.clone()),
            };
            out.add_term(pw, c.clone());
        }
        out
    }
}

/// Projection to the cyclic quotient: kills open paths, identifies rotations.
pub fn to_necklace(p: &PathPoly) -> Necklace {
    let mut out = Necklace::zero();
    for (w, c) in p.terms() {
        match w {
            PathWord::Trivial(v) => out.add_term(NecklaceWord::Idem(*v), c.clone()),
            PathWord::Word(word) => {
                if w.is_closed() {
                    out.add_term(NecklaceWord::Cyc(min_rotation(word)), c.clone());
                }
            }
        }
    }
    out
}

/// The cyclic derivative of Eq-style `d/dw`: for each occurrence of `w` in a
/// cyclic word, insert the complementary path.
pub fn cyclic_derivative(f: &Necklace, w: Arrow) -> PathPoly {
    let mut out = PathPoly::zero();
    for (nw, c) in f.terms() {
        let word = match nw {
            NecklaceWord::Idem(_) => continue,
            NecklaceWord::Cyc(word) => word,
        };
        let n = word.len();
        for i in 0..n {
            if word[i] != w {
                continue;
            }
            if n == 1 {
                // Complement of a single-arrow loop is the trivial path at its vertex.
                out.add_term(PathWord::Trivial(w.tail()), c.clone());
            } else {
                let mut comp = Vec::with_capacity(n - 1);
                comp.extend_from_slice(&word[i + 1..]);
                comp.extend_from_slice(&word[..i]);
                out.add_term(PathWord::Word(comp), c.clone());
            }
        }
    }
    out
}

/// The necklace Lie bracket `{f, g} = sum_{z in {a,x,y}} df/dz dg/dz* - df/dz* dg/dz`.
pub fn necklace_bracket(f: &Necklace, g: &Necklace) -> Result<Necklace> {
    if f.degree() > DEGREE_CAP {
        return Err(Error::DegreeCap(f.degree(), DEGREE_CAP));
    }
    if g.degree() > DEGREE_CAP {
        return Err(Error::DegreeCap(g.degree(), DEGREE_CAP));
    }
    let mut acc = PathPoly::zero();
    for z in [Arrow::A, Arrow::X, Arrow::Y] {
        let zs = z.star();
        let t1 = path_mul(&cyclic_derivative(f, z), &cyclic_derivative(g, zs))?;
        let t2 = path_mul(&cyclic_derivative(f, zs), &cyclic_derivative(g, z))?;
        acc = acc.add(&t1.sub(&t2));
    }
    Ok(to_necklace(&acc))
}

/// The symplectic element `c = [a,a*] + [x,x*] + [y,y*]` and its vertex components
/// `c1 = [a,a*] + x x* - y* y`, `c2 = y y* - x* x`.
pub fn symplectic_elements() -> (PathPoly, PathPoly, PathPoly) {
    let a = PathPoly::arrow(Arrow::A);
    let astar = PathPoly::arrow(Arrow::AStar);
    let x = PathPoly::arrow(Arrow::X);
    let xstar = PathPoly::arrow(Arrow::XStar);
    let y = PathPoly::arrow(Arrow::Y);
    let ystar = PathPoly::arrow(Arrow::YStar);
    let c = commutator(&a, &astar)
        .unwrap()
        .add(&commutator(&x, &xstar).unwrap())
        .add(&commutator(&y, &ystar).unwrap());
    let c1 = commutator(&a, &astar)
        .unwrap()
        .add(&path_mul(&x, &xstar).unwrap())
        .sub(&path_mul(&ystar, &y).unwrap());
    let c2 = path_mul(&y, &ystar)
        .unwrap()
        .sub(&path_mul(&xstar, &x).unwrap());
    (c, c1, c2)
}

/// The matrix `E = [[-xx*, -xy], [y*x*, y*y]]` of loops at vertex 1.
pub fn e_generators() -> [[PathPoly; 2]; 2] {
    let e11 = PathPoly::word(&[Arrow::X, Arrow::XStar]).neg();
    let e12 = PathPoly::word(&[Arrow::X, Arrow::Y]).neg();
    let e21 = PathPoly::word(&[Arrow::YStar, Arrow::XStar]);
    let e22 = PathPoly::word(&[Arrow::YStar, Arrow::Y]);
    [[e11, e12], [e21, e22]]
}

impl fmt::Display for PathPoly {
    /// One term per line as `coeff * w1.w2.w3`; trivial paths print as `p1`/`p2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0");
        }
        for (w, c) in &self.terms {
            let word = match w {
                PathWord::Trivial(Vertex::V1) => "p1".to_string(),
                PathWord::Trivial(Vertex::V2) => "p2".to_string(),
                PathWord::Word(arrows) => arrows
                    .iter()
                    .map(|a| a.name())
                    .collect::<Vec<_>>()
                    .join("."),
            };
            writeln!(f, "{c} * {word}")?;
        }
        Ok(())
    }
}

/// Parses the text serialization emitted by `Display`.
pub fn parse_path_poly(s: &str) -> Result<PathPoly> {
    let mut out = PathPoly::zero();
    for line in s.lines() {
        let line = line.trim();
        if line.is_empty() || line == "0" {
            continue;
        }
        let (coeff_str, word_str) = line
            .split_once('*')
            .ok_or_else(|| Error::Parse(format!("expected `coeff * word` in {line:?}")))?;
        let coeff: GaussRat = coeff_str.trim().parse()?;
        let word_str = word_str.trim();
        let w = match word_str {
            "p1" => PathWord::Trivial(Vertex::V1),
            "p2" => PathWord::Trivial(Vertex::V2),
            _ => {
                let arrows: Option<Vec<Arrow>> =
                    word_str.split('.').map(|t| Arrow::from_name(t.trim())).collect();
                let arrows =
                    arrows.ok_or_else(|| Error::Parse(format!("bad arrow in {word_str:?}")))?;
                PathWord::word(arrows)
                    .ok_or_else(|| Error::Parse(format!("non-composable word {word_str:?}")))?
            }
        };
        out.add_term(w, coeff);
    }
    Ok(out)
}
