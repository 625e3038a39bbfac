use thiserror::Error;

use crate::compatibility::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("no transition from state {state} on symbol {symbol}{}", position.map(|p| format!(" (input position {p})")).unwrap_or_default())]
    UndefinedTransition {
        state: String,
        symbol: String,
        /// 1-based input position, when known.
        position: Option<u64>,
    },

    #[error("duplicate transition from state {state} on symbol {symbol}")]
    DuplicateTransition { state: String, symbol: String },

    #[error("selector is not oblivious: state {state} has both keep and drop transitions")]
    NotOblivious { state: String },

    #[error("not irreducible: {to} is not reachable from {from}")]
    NotIrreducible { from: String, to: String },

    #[error("machine is not strongly connected ({components} components)")]
    NotStronglyConnected { components: usize },

    #[error("chain has {classes} recurrent classes; no unique stationary distribution")]
    NoUniqueStationary { classes: usize },

    #[error("eigen-solver did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("automaton is incomplete: no transition from {state} on {symbol}")]
    Incomplete { state: String, symbol: String },

    #[error("automaton is not shift-complete; missing {}", missing.join(", "))]
    NotShiftComplete { missing: Vec<String> },

    #[error("run from {state} on `{word}` is not realizable")]
    UnrealizableRun { state: String, word: String },

    #[error("enumeration of {requested} runs exceeds the cap of {cap}")]
    CapExceeded { requested: u128, cap: u128 },

    #[error("machine is not compatible with the measure ({} violations)", .0.len())]
    NotCompatible(Vec<Violation>),

    #[error("dead end: row of symbol {symbol} has no positive entry")]
    DeadEnd { symbol: String },

    #[error("block length {k} out of range for a sequence of length {len}")]
    BlockLengthOutOfRange { k: usize, len: u64 },

    #[error("closed-form snake distribution deviates from the stationary solve by {deviation:e}")]
    SnakeMismatch { deviation: f64 },

    #[error("unknown {kind} `{name}`")]
    UnknownStrategy { kind: &'static str, name: String },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
