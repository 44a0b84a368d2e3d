//! Linear partial differential operators over the expression field.

mod characteristics;
mod first_order;
mod operator;
mod symbol;

pub use characteristics::{
    find_invariants, solve_first_order_heuristic, CharacteristicsConfig, FirstOrderOutcome,
    FirstOrderSolution, ReducedSystem,
};
pub use first_order::{commutator, decompose_in_frame, frame_determinant, FirstOrderOperator};
pub use operator::LinearOperator;
pub use symbol::{
    expr_sqrt, factor_symbol, linear_symbol, principal_symbol, product_symbol, SymbolPolynomial,
};
