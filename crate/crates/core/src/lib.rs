//! Exact computation of orbifold Gromov-Witten invariants of classifying
//! stacks `BG`, twisted group algebras, and the character-sum counting
//! formulas that govern them.
//!
//! Everything is computed in exact arithmetic over cyclotomic fields; no
//! floating point enters any computation or any output. The crate is
//! organised bottom-up:
//!
//! - [`rational`] / [`cyclotomic`]: exact rationals and elements of `Q(ζ_n)`.
//! - [`group`]: finite groups as multiplication tables, with conjugacy
//!   classes, centralizers, centers, quotients and products.
//! - [`chartab`]: exact complex character tables via Dixon's modular method.
//! - [`cocycle`]: 2-cocycles with abelian or root-of-unity coefficients,
//!   central extensions, coboundary solving and cyclic holonomy.
//! - [`twisted`]: the twisted group algebra `C*(K, c)`, its center,
//!   twisted irreducible characters, idempotents and the Poincaré pairing.
//! - [`psi`]: Witten-Kontsevich descendant integrals on moduli of curves.
//! - [`counting`]: surface-group solution counts `Ω_g` and the degree
//!   formula for banded gerbes.
//! - [`gw`]: Gromov-Witten invariants of `BG`, the CohFT gluing checks,
//!   the sector transforms `I`/`J`, and the decomposition and product
//!   theorem verifiers.

pub mod chartab;
pub mod cocycle;
pub mod counting;
pub mod cyclotomic;
pub mod error;
pub mod group;
pub mod gw;
mod linalg;
pub mod psi;
pub mod rational;
pub mod selftest;
pub mod twisted;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
