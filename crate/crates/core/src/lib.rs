//! Linear maps on `M_n(ℂ)` that preserve the extreme points of the unit ball.
//!
//! In finite dimension the extreme points of the operator-norm unit ball are
//! exactly the unitaries, and a linear map sends unitaries to unitaries iff it
//! has the form `A ↦ U·A·V` or `A ↦ U·Aᵗ·V` with `U`, `V` unitary. This crate
//! decides the property for a map given as a [`superop::SuperOperator`] and,
//! when it holds, recovers `U`, `V` and the transpose flag together with
//! residuals that certify the decomposition.
//!
//! Modules, bottom up:
//! - [`linalg`]: dense complex matrices, SVD, polar, Hermitian functions,
//!   Haar sampling, null-space projections.
//! - [`extremal`]: partial-isometry classification, extreme-point test over a
//!   *-subalgebra, unitary-mean decompositions of contractions.
//! - [`superop`]: maps on matrices as matrices on column-stacked vectors.
//! - [`jordan`]: Jordan *-homomorphism residuals, central splitting into
//!   homomorphic and antihomomorphic parts, conjugating-unitary recovery.
//! - [`preserver`]: the decision pipeline, the sampling falsifier and the
//!   identity audit.
//! - [`gen`]: seeded instance generators and labelled corpora.

pub mod error;
pub mod extremal;
pub mod gen;
pub mod jordan;
pub mod linalg;
pub mod preserver;
pub mod superop;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance, C64};
pub use superop::SuperOperator;
