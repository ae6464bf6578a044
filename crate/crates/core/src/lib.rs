//! Coherent-state quantization of the 2-sphere built on spin spherical
//! harmonics, the Madore-style fuzzy sphere on the same Hilbert space, and the
//! exact SU(2) machinery (3j-symbols, representation matrices, Jacobi
//! polynomials) needed to check the identities that relate them.
//!
//! All spin labels are passed around as twice-values ([`HalfInt`]) so that
//! half-integer spins never go through floating point.

pub mod algebra;
pub mod csquant;
mod error;
pub mod export;
pub mod fuzzy;
pub mod operator;
pub mod quad;
pub mod specfun;
pub mod sphere;
pub mod ssh;
pub mod verify;
pub mod wigner;

pub use algebra::{binomial, factorial, ExactRadical, HalfInt};
pub use error::{Error, Result};
pub use operator::OperatorMatrix;
pub use sphere::{PhiPeriod, SpherePoint};
pub use ssh::SshParams;

/// Complex scalar used for every numerical matrix and function value.
pub type Complex = num_complex::Complex64;
