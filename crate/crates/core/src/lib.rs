//! Exact counting lab for consecutive squarefree values `[αp]`, `[αp]+1`
//! over primes `p`, with certified constants, the Möbius decomposition of the
//! count, and empirical harnesses for the exponential-sum and discrepancy
//! bounds behind its asymptotic `σ·π(N)`.
//!
//! Counting is exact integer arithmetic throughout. Floating-point analytics
//! (enclosures, exponential sums, discrepancy) are generic over [`Real`]; the
//! `*64` aliases below fix them to `f64`, which is what the CLI uses.

pub mod alpha_exact;
pub mod arith_sieves;
pub mod cli_harness;
pub mod constants;
pub mod counting;
mod error;
pub mod expsum_lab;
mod scalar;

pub use alpha_exact::AlgebraicAlpha;
pub use arith_sieves::{Channels, Sieve, SieveConfig, SieveSegment};
pub use counting::{DecompositionReport, ExponentFit, PairCountReport};
pub use error::{Error, Result};
pub use expsum_lab::{DyadicQuery, ExpSumQuery};
pub use scalar::Real;

pub type Enclosure64 = constants::Enclosure<f64>;
pub type Enclosure32 = constants::Enclosure<f32>;
pub type BoundReport64 = expsum_lab::BoundReport<f64>;
pub type BoundReport32 = expsum_lab::BoundReport<f32>;
pub type Complex64 = num_complex::Complex<f64>;
/// Exact rational used for isolating intervals of polynomial roots.
pub type Rational = num_rational::BigRational;
