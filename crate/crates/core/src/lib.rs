//! Numerical and symbolic toolkit for nonlinear inhomogeneous Cauchy-Riemann
//! equations `u_zbar = E(z, u)`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports,
//! plots and the command line live in the companion `crkit` crate.
//!
//! Module map:
//!
//! * [`grid`]: uniform-grid samples, finite-difference Wirtinger derivatives,
//!   PDE residuals, the rectangle Green identity and Hölder fits.
//! * [`transforms`]: Cauchy and Beurling transforms of compactly supported
//!   grid data and the sigma function used for zero-set arguments.
//! * [`series`]: truncated power/Laurent series, reciprocal and primitive of
//!   Laurent expansions, and the normal-form map near a simple zero.
//! * [`separable`]: explicit and implicit solution families of
//!   `u_zbar = f(u) g(z)`.
//! * [`counterexample`]: the borderline function `V` whose z-derivative is
//!   unbounded near the origin while its zbar-derivative is continuous.
//! * [`almost_complex`]: almost complex structures on R^4 in normal
//!   coordinates and J-holomorphic curve checks.

#![no_std]
// `!(x < y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod almost_complex;
pub mod counterexample;
mod error;
pub mod exec;
pub mod grid;
mod math;
pub mod separable;
pub mod series;
pub mod transforms;

pub use error::{Error, Result};
pub use exec::{Executor, Serial};
pub use grid::{GridFunction, GridGeometry, HolderEstimate, Rect, ResidualReport};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Shorthand for `C64::new(re, im)`.
#[inline]
pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
