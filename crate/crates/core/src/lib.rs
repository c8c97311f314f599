//! Rudin-Shapiro polynomials and lacunary walks on compact groups.
//!
//! The crate is organized around six pieces:
//!
//! * [`poly`] — exact Laurent-polynomial arithmetic (big-integer, rational
//!   and complex-double coefficient variants) with subquadratic products.
//! * [`rudin_shapiro`] — construction of the `(P_k, Q_k)` pairs, the exact
//!   polynomial identities they satisfy, and exact rational moments of
//!   `|P_k|` over the unit circle.
//! * [`circle`] — batch evaluation of `P_k` at roots of unity and the
//!   empirical distribution statistics (uniform squared modulus on `[0,1]`,
//!   uniform values in the unit disc, minimum modulus, and the matrix-product
//!   factorization check).
//! * [`su2`] — the irreducible representations `t^l` of SU(2) by exact
//!   coefficient extraction, and the rank/contraction properties of the
//!   constant matrix `tau^l` that drive the spectral argument.
//! * [`halving`] — the even-part halving operators `S_l` and `S_{l,lambda}`
//!   on vectors of Laurent polynomials, their spectra, and exact expected
//!   representation matrices of the lacunary matrix products.
//! * [`walk`] — exact distributions of lacunary products of dyadic step
//!   functions into finite groups, and Monte Carlo statistics of the
//!   2x2 matrix walks.
//!
//! [`acceptance`] bundles the end-to-end checks used by the test suite and
//! the `rswalk accept` subcommand.

pub mod acceptance;
pub mod circle;
pub mod error;
pub mod halving;
pub mod poly;
pub mod rudin_shapiro;
pub mod su2;
pub mod walk;

pub use error::{Error, Result};
pub use poly::{CxPoly, IntPoly, LaurentPoly, RatPoly};
pub use rudin_shapiro::RudinShapiroPair;

pub use nalgebra;
