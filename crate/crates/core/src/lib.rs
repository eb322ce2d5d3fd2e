//! Exact tools for deciding when two positive definite ternary quadratic
//! forms represent the same integers.
//!
//! - [`forms`]: coefficients, doubled Gram matrices, evaluation.
//! - [`enumerate`]: complete bounded enumeration of lattice points.
//! - [`isometry`]: search for `T` with `T^t M_f T = d^2 M_g`, eigen data.
//! - [`congruence`]: residue vectors, good/bad classification, precedence.
//! - [`prover`]: full two-directional proofs, table verification.
//! - [`certificate`]: serialized proofs and a search-free checker.
//! - [`fixtures`]: the named forms used throughout.

pub mod certificate;
pub mod congruence;
pub mod enumerate;
pub mod fixtures;
pub mod forms;
pub mod isometry;
pub mod prover;

pub use forms::{Mat3, QuadForm, RepSet, Vector3};
