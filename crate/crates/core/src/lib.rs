//! Continued fractions, heights on rational points, recursive integrability of
//! `-g' = g² + f`, and Dirichlet-type decisions for approximation functions on `R^d`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cfrac;
pub mod dataprog;
pub mod dirichlet;
pub mod error;
pub mod funexpr;
pub mod heights;
pub mod real;
pub mod recint;

pub use cfrac::{ContinuedFraction, Convergent, Rational};
pub use error::{Error, Result};
pub use funexpr::{FuncExpr, PsiSpec};
pub use heights::{HeightKind, RationalPoint};
pub use real::Real;
