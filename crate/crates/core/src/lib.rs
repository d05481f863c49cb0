//! Exact lattice models of complex abelian varieties and their symplectic
//! structures.
//!
//! An abelian variety of dimension `g` is a lattice `Z^{2g}` with a rational
//! complex structure `J`. Everything is computed with arbitrary-precision
//! integers and rationals; there is no floating point anywhere.

pub mod acceptance;
pub mod av;
pub mod engine;
pub mod groups;
pub mod lattice;
pub mod symplectic;
