use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch between operands")]
    AlphabetMismatch,

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("determinization exceeded the cap of {cap} subset-states")]
    DeterminizationCap { cap: usize },

    #[error("word enumeration of {words} words exceeds the guard of {guard}")]
    EnumerationGuard { words: u128, guard: u64 },

    #[error("singular linear system over a product of {states} states")]
    SingularSystem { states: usize },

    #[error("iterative solve did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("probability {0} lies outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("invalid probabilistic automaton: {}", .0.join("; "))]
    InvalidPa(Vec<String>),

    #[error("automaton is not deterministic")]
    NotDeterministic,

    #[error("automaton is not complete: state {state} lacks a successor on `{symbol}`")]
    NotComplete { state: usize, symbol: String },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Whether the error stems from a configured resource cap rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::DeterminizationCap { .. }
                | Error::EnumerationGuard { .. }
                | Error::NoConvergence { .. }
        )
    }
}
