//! Exact symbolic engine for the two `h`-deformed (Jordanian) Minkowski
//! algebras: their coordinates, derivatives and one-forms.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalars`] — the coefficient field: rational functions in the formal
//!   parameters `h` and `r` over the rationals, always in canonical form.
//! * [`ncalg`] — the free associative *-algebra on named noncommuting
//!   generators with `scalars` coefficients.
//! * [`rewrite`] — orientation of relation sets into terminating rewrite
//!   systems, normal forms, diamond-lemma confluence checking and bounded
//!   completion.
//! * [`tensor`] — matrix calculus over algebra entries with tensor-leg
//!   operations (leg embedding, flip, partial transpose/trace, dagger,
//!   exact inverses over the parameter field).
//! * [`catalog`] — the constant matrices and relation sets of the two
//!   deformation models `M1` (extra parameter `r`) and `M2`.
//! * [`verifier`] — the identity suite: expands the defining reflection
//!   equations, derives the algebra relations and checks every structural
//!   property exactly (no tolerances anywhere).
//! * [`oracle`] — an independent naive evaluator used to cross-validate the
//!   rewrite engine at rational parameter points.

pub mod catalog;
pub mod ncalg;
pub mod oracle;
pub mod rewrite;
pub mod scalars;
pub mod tensor;
pub mod verifier;

pub use catalog::{ModelId, ModelSpec};
pub use ncalg::{AlgElement, Alphabet, GenId, Word};
pub use scalars::ParamScalar;
pub use tensor::AlgMatrix;
pub use verifier::{CheckReport, CheckStatus, Verifier};
