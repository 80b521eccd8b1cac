//! Magnitude of finite metric spaces and convex bodies, intrinsic volumes,
//! and the exact odd-dimensional ball formula built from disjoint Schröder
//! path collections.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`], [`special`], [`space`], [`body`], [`rng`]: shared types,
//!   exact rational and polynomial arithmetic, seeded random streams.
//! - [`magnitude`]: similarity matrices, weightings and the magnitude of
//!   finite positive-definite metric spaces.
//! - [`hull`] and [`intrinsic`]: low-dimensional hull volumes, exact and
//!   Monte Carlo intrinsic volumes.
//! - [`schroeder`]: exact magnitude of odd-dimensional balls.
//! - [`embedding`]: the Rademacher embedding of `ℓ2^d` into `ℓ1`.
//! - [`bounds`]: upper bounds, reference formulas and sandwich reports.

// Range checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod body;
pub mod bounds;
pub mod embedding;
mod error;
pub mod hull;
pub mod intrinsic;
pub mod magnitude;
pub mod rng;
pub mod schroeder;
pub mod space;
pub mod special;

pub use arith::{ExactRational, PolynomialQ, RationalFunctionQ};
pub use body::ConvexBodySpec;
pub use error::{Error, Result};
pub use rng::RandomStream;
pub use space::{FiniteMetricSpace, Metric};
