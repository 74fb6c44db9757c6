//! Exact arithmetic for restricted Lie-Rinehart algebras in characteristic p.

pub mod brauer;
pub mod commalg;
pub mod document;
pub mod error;
pub mod ext;
pub mod field;
pub mod linalg;
pub mod lrin;
pub mod report;
pub mod rlie;
pub mod uenv;

pub use error::{Error, Result};
pub use field::{BaseField, FieldKind, Poly, PrimeField, RatFunc, Vector};
pub use linalg::{Matrix, Solution};
pub use report::{CheckOutcome, Report};
pub use report::CheckConfig;
pub use commalg::{AssocAlgebra, CommAlgebra, Derivation, InsepExtension};
pub use rlie::{LieAlgebra, RestrictedLie};
pub use lrin::{check_lrr_axioms, der_algebra, LieRinehart, RestrictedLieRinehart};
pub use uenv::{BeckModule, Enveloping};
pub use ext::{Extension, ExtensionData};
pub use brauer::{BrauerDemo, CrossedProduct};
pub use document::{AlgebraDocument, DocError};
