//! Rational homology of the commutative graph complex and of its quotient by
//! graphs with cut vertices.

pub mod bialgebra;
pub mod canonical;
pub mod cli;
pub mod complex;
pub mod enumerate;
pub mod error;
pub mod exactrank;
pub mod multigraph;
pub mod orient;
pub mod verify;

pub use error::{Error, Result};
