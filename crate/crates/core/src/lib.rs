//! Minimal hypercyclic tuples of matrices on ℂⁿ and ℝⁿ.
//!
//! Builds the commutative algebra generated by a commuting tuple, splits it
//! into characters and spectral idempotents, constructs tuples whose
//! semigroup orbits are dense, and measures density empirically by grid
//! coverage.

pub mod algebra;
pub mod construct;
pub mod error;
pub mod expmap;
pub mod numkit;
pub mod orbit;
pub mod semigroup;

pub use algebra::{CharacterTable, CommutativeAlgebra};
pub use construct::TupleSpec;
pub use error::{Error, Result};
pub use numkit::{Field, Matrix, Tolerance, C64};
pub use orbit::{BoxRegion, CoverageReport, OrbitBudget, Verdict};
pub use semigroup::{IndependentReals, Scheme};
