//! Arithmetic classification and counting of cyclic, strictly abelian and
//! strictly nilpotent numbers, exact coefficients of their asymptotic
//! expansions, and numerical checks of the supporting analytic identities.

pub mod arithmetic;
pub mod asymptotics;
pub mod bigreal;
pub mod census;
pub mod cli;
pub mod constants;
pub mod error;
pub mod primes;
pub mod quadrature;
pub mod series;
pub mod symbolic;

pub use error::{Error, Result};
