//! Diagonal transversal gates of CSS codes.
//!
//! For a CSS code built from nested binary codes `C2 <= C1` this crate computes
//! the groups of `b in Z_N^n` (`N = 2^l`) for which `U(b) = (x) diag(1, w^b_i)`
//! fixes the code space (`H_N`), acts as a tensor product of single-qubit
//! logical gates (`T_N`), or acts as the logical identity (`Id_N`). Each group
//! is the annihilator of a family of star products of basis vectors, computed
//! exactly in Howell normal form over `Z_N`.
//!
//! Modules:
//! - [`bincode`]: GF(2) codes, duals, star products and nested bases
//! - [`zmod`]: Howell form, annihilators and module lengths over `Z_{2^l}`
//! - [`gates`]: the groups, logical phases and controlled-phase decompositions
//! - [`monomial`]: closed forms for codes spanned by monomial evaluations
//! - [`oracle`]: brute-force classification straight from the definitions
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
#![allow(clippy::len_without_is_empty)]

extern crate alloc;

pub mod bincode;
pub mod error;
pub mod gates;
pub mod monomial;
pub mod oracle;
pub mod zmod;

pub use bincode::{BinaryCode, BitVector, NestedCodePair};
pub use error::{Error, Hypothesis, Result};
pub use gates::{CssCode, DiagonalGate, GateGroups, LogicalDecomposition, PhaseProfile};
pub use zmod::{ZModule, ZVector};
