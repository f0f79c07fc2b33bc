//! Exact q-partial fractions of restricted-partition generating functions.

pub mod bernoulli;
pub mod cli;
pub mod dedekind;
pub mod denum;
pub mod error;
pub mod evalop;
pub mod qpf;
pub mod ratpoly;
pub mod waves;

pub use error::{Error, Result};
pub use ratpoly::{cyclotomic, psi, Poly, Rational};
