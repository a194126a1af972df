//! Exact computations with A_n-algebras and A_n-modules over a field.
//!
//! The crate checks Stasheff relations, transfers A_infinity structures to homology,
//! computes extension obstructions on the bar complex and builds the bar-construction
//! Postnikov tower of a module.

pub mod barpost;
pub mod dga;
pub mod field;
pub mod graded;
pub mod io;
pub mod linalg;
pub mod models;
pub mod obstruction;
pub mod random;
pub mod signs;
pub mod structures;
pub mod transfer;
