//! Sums of arithmetic functions over values of binary forms.

pub mod arith;
pub mod harness;
pub mod intpoly;
pub mod lattice2d;
pub mod nt;
pub mod numfield;
pub mod polymod;
pub mod region;
pub mod sieve;
