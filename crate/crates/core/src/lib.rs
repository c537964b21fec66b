//! Numerical calculus for symmetric quasi-Banach ideals of compact operators,
//! worked at finite matrix truncation.
//!
//! The crate is layered bottom-up:
//!
//! * [`sequences`]: decreasing rearrangements, dilations, pointwise algebra.
//! * [`spaces`]: symmetric sequence spaces (Schatten, Lorentz, Marcinkiewicz,
//!   uniform) with their quasi-norms and concavity moduli.
//! * [`operators`]: dense complex matrices, singular values, ideal quasi-norms
//!   obtained by applying a sequence norm to the singular values.
//! * [`multipliers`]: supremum estimates of multiplier norms `F:G` and `J:I`.
//! * [`derivations`]: inner derivations `x -> [a, x]`, their norms between
//!   ideals, and recovery of a generator from a black-box derivation.

pub mod derivations;
pub mod error;
pub mod multipliers;
pub mod operators;
#[cfg(any(test, feature = "oracles"))]
pub mod oracles;
pub mod pava;
mod search;
pub mod sequences;
pub mod spaces;

pub use derivations::{DerivationNormReport, DerivationSpec, Gauge, Recovery};
pub use error::{Error, Result};
pub use multipliers::{NormEstimate, SearchBudget, Side, Status, Strategy, Witness};
pub use nalgebra;
pub use operators::{Ensemble, Matrix, SingularValues};
pub use sequences::{InequalityCheck, Sequence};
pub use spaces::{MultiplierSpace, SpaceKind, SpaceSpec, WeightFamily, WeightSequence};

/// Absolute slack absorbed by every entrywise or scalar inequality check.
pub const SLACK_TOL: f64 = 1e-10;

/// Relative tolerance for equalities that pass through a dense decomposition.
pub const EQ_REL_TOL: f64 = 1e-8;
