//! Clifford algebras built from quadratic forms and Hessians, reasonable
//! tensor norms on finite tensor products, and reproducing kernels of
//! Hilbert function spaces together with their Fock-space extensions.
//!
//! The crate is organised bottom-up:
//!
//! * [`quadratic`] holds symmetric bilinear forms, polarization and the
//!   Jacobi eigen-solver used to find orthogonal frames.
//! * [`clifford`] multiplies blades of a diagonal-metric Clifford algebra.
//! * [`calculus`] differentiates functionals, computes Legendre points and
//!   attaches a Clifford algebra to the Hessian at a point.
//! * [`tensor`] covers order-2 and order-p tensors, the injective,
//!   projective, Hilbert-Schmidt and AGM norms, and Schauder truncations.
//! * [`kernels`] evaluates the example reproducing kernels and checks the
//!   reproducing identity by quadrature.
//! * [`fock_kernels`] assembles Gram matrices, permanents and determinants
//!   for symmetric and antisymmetric Fock kernels.
//! * [`ledger`] runs the oracles that settle the known inconsistencies of
//!   the printed formulas.
//! * [`cli`] is the command-line front end.

pub mod calculus;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod fock_kernels;
pub mod kernels;
pub mod ledger;
pub mod linalg;
pub mod quadratic;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;
