use thiserror::Error;

use crate::machine::Defect;

/// Errors raised by the workbench library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: symbol {symbol:?} at position {position} is not in the input alphabet")]
    InvalidInput { symbol: char, position: usize },

    #[error("machine is invalid: {}", format_defects(.0))]
    InvalidMachine(Vec<Defect>),

    #[error("fuel must be positive")]
    ZeroFuel,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("certificate budget exceeded: {required} certificates needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("trie depth {n} exceeds the configured limit {limit}")]
    TrieTooLarge { n: usize, limit: usize },

    #[error("run on input {input:?} exhausted its fuel of {fuel} steps")]
    FuelExhausted { input: String, fuel: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing {0}")]
    MissingField(&'static str),

    #[error("{0}")]
    Syntax(String),
}

fn format_defects(defects: &[Defect]) -> String {
    defects
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
