//! Executable constructions for subcartesian spaces presented inside `R^N`.

pub mod dist;
pub mod document;
pub mod embed;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod bundle;
pub mod cover;
pub mod linalg;
pub mod partition;
mod rng;
pub mod space;

pub use error::{Error, Result};
pub use expr::{make_bump, parse_expr, ExprVec, SmoothExpr};
