//! Orthogonal polynomials with respect to a pair (L, μ), where L is an
//! exactly solvable differential operator and μ a positive measure.
//!
//! The crate decides normality of indices, generates the difference
//! equations that classify admissible measures, bounds and computes zeros,
//! and checks strong asymptotics for polar polynomials of Bernstein–Szegő
//! measures.
//!
//! Numeric code is generic over [`Scalar`]: exact rationals, `f64`,
//! `Complex64`, [`Extended`] (MPFR-backed) and [`Surd`] (a quadratic field).

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod moments;
pub mod operator;
pub mod oracle;
pub mod polar;
pub mod poly;
pub mod quad;
pub mod scalar;
pub mod solver;
pub mod zeros;

pub use error::{Error, Result};
pub use moments::{MomentSequence, OrthogonalFamily};
pub use operator::{ExactlySolvableOperator, FactorizedOperator, OperatorMatrix};
pub use poly::{ChebyshevExpansion, Polynomial};
pub use scalar::{Extended, Rational, RealScalar, Scalar, ScalarMode, Surd, Transcendental};
