//! Instanton moduli spaces `N_{k,tau}` of ADHM data, the hat construction and
//! embeddings `N_k -> N_{k+1}`, transverse-slice normal forms, Darboux-type
//! coordinates, the exact necklace algebra of the doubled instanton quiver,
//! and the group of tame symplectomorphisms acting on representation data.
//!
//! The numeric half of the library is generic over the real scalar via the
//! [`Real`] trait (any `num_traits::Float` with conversions, i.e. `f32`/`f64`);
//! the symbolic half is exact over Gaussian rationals.  The aliases at the
//! crate root fix `f64`, which is what the CLI and the verification suites use.

pub mod error;
pub mod gauss;
pub mod ncalg;

pub mod linalg;
pub mod rep;
pub mod hat;
pub mod slice;
pub mod darboux;
pub mod autgrp;

pub mod sample;
pub mod io;
pub mod verify;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive};

pub use error::{Error, Result};

/// Real scalar for the numeric half of the library.
pub trait Real: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static {}
impl<T: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static> Real for T {}

/// Complex scalar over a [`Real`] type.
pub type C<R> = Complex<R>;

/// Default complex scalar.
pub type C64 = Complex<f64>;

/// Default dense complex matrix.
pub type Mat64 = linalg::Mat<f64>;

/// Default ADHM datum `(A, B, i, j)` with `i: C^2 -> C^k`, `j: C^k -> C^2`.
pub type Adhm64 = rep::AdhmData<f64>;

/// Default representation of the doubled instanton quiver.
pub type Rep64 = rep::QuiverRep<f64>;
