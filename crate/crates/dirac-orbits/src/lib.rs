//! Dirac operator families on coadjoint orbits as explicit finite matrices.
//!
//! The crate builds irreducible representations of small compact Lie algebras,
//! their Clifford/spin modules and Kostant's cubic Dirac operator, and uses them
//! to check kernel localization on coadjoint orbits, the Kirillov character
//! formula via an equivariant Chern character, and (for SL(2,R) discrete series)
//! the spectral picture of the sign-flipped Dirac family and the Rossman formula.

pub mod chern;
pub mod cli;
pub mod clifford;
pub mod dirac;
pub mod discseries;
pub mod error;
pub mod linalg;
pub mod repbuild;
pub mod rootsys;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
