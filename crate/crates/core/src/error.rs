use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unknown token {token} for item {item}")]
    UnknownToken { item: usize, token: usize },
    #[error("item set {set:#b} is out of range for {items} items")]
    SetOutOfRange { set: u32, items: usize },
    #[error("tabular valuation has no entry for types {types:?} and set {set:#b}")]
    MissingTableEntry { types: Vec<usize>, set: u32 },
    #[error("valuation violates its axioms: {0}")]
    AxiomViolation(String),
    #[error("enumeration budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded { what: String, needed: u128, budget: u128 },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("linear program solver failed: {0}")]
    SolverFailure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing certified equilibrium: {0}")]
    MissingEquilibrium(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_budget(what: &str, needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: what.to_string(),
            needed,
            budget,
        });
    }
    Ok(())
}
