//! Exact Gaussian-rational coefficients for the symbolic half of the library.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// A Gaussian rational: exact rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn i() -> Self {
        GaussRat::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Lossy conversion to a floating complex value, used at the evaluation boundary.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        fn rat_to_f64(r: &BigRational) -> f64 {
            let n = r.numer();
            let d = r.denom();
            // Exact for the small coefficients occurring in practice.
            let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
            let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
            nf / df
        }
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::from_int(0)
    }
    fn is_zero(&self) -> bool {
        GaussRat::is_zero(self)
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::from_int(1)
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl AddAssign for GaussRat {
    fn add_assign(&mut self, rhs: GaussRat) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        GaussRat { re, im }
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &'a GaussRat) -> GaussRat {
        self.clone() * rhs.clone()
    }
}

impl fmt::Display for GaussRat {
    /// `3/2`, `-1+2i`, `i`, `0`, `1/2-1/3i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        if !self.re.is_zero() {
            out.push_str(&self.re.to_string());
        }
        if !self.im.is_zero() {
            if self.im.is_positive() && !self.re.is_zero() {
                out.push('+');
            }
            let one = BigRational::one();
            if self.im == one {
                out.push('i');
            } else if self.im == -one.clone() {
                out.push_str("-i");
            } else {
                out.push_str(&self.im.to_string());
                out.push('i');
            }
        }
        write!(f, "{out}")
    }
}

impl FromStr for GaussRat {
    type Err = Error;

    /// Parses the grammar emitted by `Display`.
    fn from_str(s: &str) -> Result<GaussRat> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty coefficient".into()));
        }
        // Split into at most two signed parts; a part ending in `i` is imaginary.
        let mut parts: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (idx, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && idx > 0 && !cur.ends_with('/') {
                parts.push(cur.clone());
                cur.clear();
            }
            cur.push(ch);
        }
        parts.push(cur);
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for p in parts {
            let p = p.trim();
            if let Some(body) = p.strip_suffix('i') {
                let body = match body {
                    "" | "+" => "1",
                    "-" => "-1",
                    b => b,
                };
                im += parse_rat(body)?;
            } else {
                re += parse_rat(p)?;
            }
        }
        Ok(GaussRat { re, im })
    }
}

fn parse_rat(s: &str) -> Result<BigRational> {
    BigRational::from_str(s).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = GaussRat::from_ints(1, 2);
        let b = GaussRat::from_ints(3, -1);
        let prod = a.clone() * b.clone();
        // (1+2i)(3-i) = 3 - i + 6i - 2i^2 = 5 + 5i
        assert_eq!(prod, GaussRat::from_ints(5, 5));
        assert_eq!(a.clone() + b.clone(), GaussRat::from_ints(4, 1));
        assert!((a.clone() - a).is_zero());
    }

    #[test]
    fn display_roundtrip() {
        for g in [
            GaussRat::from_int(0),
            GaussRat::from_ints(-3, 0),
            GaussRat::from_ints(0, 1),
            GaussRat::from_ints(0, -1),
            GaussRat::from_ints(2, -5),
            GaussRat::new(
                BigRational::new(BigInt::from(1), BigInt::from(2)),
                BigRational::new(BigInt::from(-1), BigInt::from(3)),
            ),
        ] {
            let s = g.to_string();
            let back: GaussRat = s.parse().unwrap();
            assert_eq!(g, back, "roundtrip of {s}");
        }
    }
}
