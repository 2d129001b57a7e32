//! Tolerances shared across the crate.

/// Residual budget for closed-form identities.
pub const EXACT: f64 = 1e-10;
/// Residual budget for iterative solvers.
pub const ITERATIVE: f64 = 1e-6;
/// Orthonormality check for subspace bases.
pub const ORTHONORMAL: f64 = 1e-12;
/// Cosine threshold for the orthogonal/antipodal generator test.
pub const PAIRWISE: f64 = 1e-10;
/// Rank cutoff used when orthogonalizing spanning sets.
pub const RANK: f64 = 1e-9;
