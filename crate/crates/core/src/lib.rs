//! Semi-Hilbertian operator functionals on finite-dimensional spaces.
//!
//! A positive semidefinite weight `A` induces the semi-inner product
//! `<x, y>_A = <Ax, y>`. This crate computes the associated operator
//! functionals (A-seminorm, A-adjoint, A-numerical radius, A-Crawford number,
//! A-cosine of angle, distance to scalars) and evaluates the standard
//! inequality chains between them as [`certify::Certificate`]s.
//!
//! Every functional is reduced to a classical functional of an `r x r`
//! compression of the operator, where `r = rank(A)`; see
//! [`space::SemiHilbertSpace::compress`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod certify;
pub mod ensembles;
mod error;
pub mod functionals;
pub mod linalg;
pub mod space;

pub use error::{Error, Result};
pub use linalg::{CMatrix, RankTolerance, C64};
pub use space::{CompressedOperator, SemiHilbertSpace};
