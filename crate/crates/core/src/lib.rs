//! Intrinsic geometry of almost contact metric structures.
//!
//! A structure is given in an adapted chart `(x^1, .., x^n)` with Reeb field
//! `xi = d/dx^n` by a contact form `eta` with `eta_n = 1`, an admissible
//! almost complex structure `phi` and an admissible metric `g` on the
//! distribution `D = ker eta`. Components of `phi` and `g` refer to the
//! adapted frame `e_a = d_a - eta_a d_n`.
//!
//! Modules, bottom up:
//!
//! - [`expr`], [`jet`]: parsed component functions with exact first and second
//!   derivatives.
//! - [`structure`]: structure data, axiom checks, gallery, chart maps.
//! - [`frames`]: adapted frame, nonholonomicity, `omega = d eta`, `d_n` of
//!   admissible tensors.
//! - [`nijenhuis`]: Nijenhuis torsion blocks and the normality residual.
//! - [`connections`]: metric and phi-compatible intrinsic connections.
//! - [`classify`]: predicates, the extended metric and the K-contact chain.
//! - [`format`]: structure files and JSON reports.

// Index loops mirror the component formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod classify;
pub mod connections;
pub mod expr;
pub mod format;
pub mod frames;
pub mod grid;
pub mod jet;
pub mod nijenhuis;
pub mod report;
pub mod structure;
pub mod tensor;

pub use classify::{classify, ClassificationReport, Predicate};
pub use expr::{parse, EvalError, Expr, ParseError};
pub use jet::Jet2;
pub use report::Verdict;
pub use structure::{builtin, validate, SampleSpec, StructureDef, ValidationReport};
pub use tensor::{Tensor, TensorExpr, Valence};
