//! Exact symbolic engine for second-order linear partial differential
//! equations: Laplace cascades in two variables and Dini transformations
//! in three.

pub mod algebraic;
pub mod dini;
pub mod error;
pub mod expr;
pub mod integrate;
pub mod laplace;
pub mod linalg;
pub mod lpdo;
pub mod poly;
pub mod syntax;
pub mod zero;

pub use error::{ExprError, Result};
pub use expr::Expr;
pub use lpdo::{FirstOrderOperator, LinearOperator};
