//! Finite-field verification of maximal rank for twisted tangent bundles
//! and differentials at general points of projective space, Betti tables of
//! point ideals, and symbolic certificates for the Horace induction.

pub mod betti;
pub mod cli;
pub mod error;
pub mod exactdims;
pub mod ffla;
pub mod horacesched;
pub mod maxrank;
pub mod sections;

pub use error::{Error, Result};
