//! Braided group-categories, their bar-construction cohomology, and the
//! homological field theories they produce on finite CW complexes.
//!
//! Everything is exact: structure constants live in cyclotomic integer
//! rings and homology is computed with Smith normal forms over `Z/m`.

pub mod abelian;
pub mod barcohomology;
pub mod cellular;
pub mod corpus;
pub mod error;
pub mod exactring;
pub mod groupcat;
pub mod tqft;

pub use error::{Error, Result};
