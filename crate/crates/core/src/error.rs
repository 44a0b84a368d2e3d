use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by an expression that normalizes to zero")]
    DivisionByZero,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("operator order {0} is not supported here")]
    UnsupportedOrder(usize),
    #[error("symbol is not factorable over the coefficient field")]
    NotFactorable,
    #[error("symbol has a repeated factor")]
    RepeatedFactor,
    #[error("operator is not strictly hyperbolic: {0}")]
    NotHyperbolic(String),
    #[error("frame is not generic: {0}")]
    NotGeneric(String),
    #[error("transformation undefined: {0}")]
    Undefined(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, ExprError>;
