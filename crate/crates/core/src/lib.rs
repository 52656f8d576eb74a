//! A non-contextual hidden-variable model for finite-dimensional quantum
//! mechanics.
//!
//! Each measurement event draws one scalar hidden variable `c ∈ (0, 1)`. The
//! outcome assigned to an observable is the smallest eigenvalue whose
//! cumulative Born weight (eigenvalues taken in ascending order) reaches `c`;
//! afterwards the state collapses onto the selected eigenspace. The resulting
//! prediction map reproduces Born statistics and is non-contextual, but it is
//! not functionally consistent: algebraic relations between commuting
//! observables only hold for sequential measurements (weak functional
//! consistency).
//!
//! The crate is `no_std` and needs only `alloc`.
//!
//! * [`opalg`]: complex matrices, Hermitian operators, spectral projectors
//! * [`model`]: hidden state, prediction, collapse and measurement traces
//! * [`expr`]: polynomial observable expressions and the Peres-Mermin square
//! * [`consistency`]: functional-consistency checkers and the parity search
//! * [`random`]: seeded substreams and random states / observables

#![no_std]

extern crate alloc;

pub mod consistency;
pub mod error;
pub mod expr;
pub mod model;
pub mod opalg;
pub mod random;

pub use error::{Error, Result};
