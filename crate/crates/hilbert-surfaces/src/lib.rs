//! Invariants of the Hilbert modular surfaces `Z(N, r)` and of their
//! quotients `W(N, r)` by the swap of the two factors.
//!
//! The crate is organised bottom-up: [`arith`] holds exact number theory,
//! [`hj`] resolves cyclic quotient singularities, [`gl2`] works with matrices
//! over `ℤ/Nℤ`, [`modular_curves`] computes signatures of the curves in the
//! fixed locus, and [`surface`] assembles the invariants of `Z` and `W`.
//! [`diagram`] renders the configuration of curves over the cusp and [`cli`]
//! drives everything from the command line.

pub mod arith;
pub mod cli;
pub mod diagram;
pub mod error;
pub mod gl2;
pub mod hj;
pub mod modular_curves;
pub mod surface;

pub use error::{Error, Result};
