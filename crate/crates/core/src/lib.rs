//! Compatibility relations between finite-outcome quantum observables.
//!
//! The crate decides, with verifiable certificates, whether two POVMs on a
//! finite-dimensional Hilbert space commute (COM), admit a non-disturbing
//! sequential measurement (ND), are jointly measurable (JM), or are
//! coexistent (COEX), and measures how robust those relations are against
//! mixing with uniform noise.
//!
//! - [`linalg`]: dense complex Hermitian matrices, eigendecomposition,
//!   positive-semidefinite projection.
//! - [`povm`]: effects, POVMs, binary coarse-grainings, range queries.
//! - [`feasibility`]: block-structured semidefinite feasibility via Dykstra
//!   alternating projections, with Farkas-style infeasibility witnesses.
//! - [`compat`]: the four compatibility checks and noise robustness.
//! - [`experiments`]: the bundled counterexample (a coexistent but not
//!   jointly measurable pair), segment and sampling experiments, and the
//!   cited-property test suites.

pub mod compat;
pub mod experiments;
pub mod feasibility;
pub mod linalg;
pub mod povm;

pub use linalg::{ComplexMatrix, EigenDecomposition, HermitianMatrix};
// re-exports are added as modules land
