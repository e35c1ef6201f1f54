//! Minimal discrepancy of isolated singularities and the SFT indices of the
//! Reeb orbits on their links.

pub mod catalog;
pub mod discrepancy;
pub mod linalg;
pub mod orbits;
pub mod rational;
pub mod resolution;
pub mod symplectic;
