use thiserror::Error;

/// A single violated problem invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("factor {factor}: unknown variable {variable}")]
    UnknownVariable { factor: String, variable: String },
    #[error("factor {factor}: variable {variable} appears twice in scope")]
    DuplicateScopeVariable { factor: String, variable: String },
    #[error("factor {factor}: table length mismatch (expected {expected}, got {actual})")]
    TableLengthMismatch {
        factor: String,
        expected: usize,
        actual: usize,
    },
    #[error("factor {factor}: invalid table entry at index {index} ({value})")]
    InvalidEntry {
        factor: String,
        index: usize,
        value: f64,
    },
    #[error("variable {variable}: empty domain")]
    EmptyDomain { variable: String },
    #[error("variable {variable}: duplicate variable id")]
    DuplicateVariable { variable: String },
    #[error("variable {variable}: no agent assigned")]
    MissingAgent { variable: String },
    #[error("agent map has {actual} entries for {expected} variables")]
    AgentMapSize { expected: usize, actual: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("assignment is partial: variable {0} is unassigned")]
    PartialAssignment(String),
    #[error("assignment value {value} out of range for variable {variable}")]
    ValueOutOfRange { variable: String, value: usize },
    #[error("variable {0} is not in the factor scope")]
    NotInScope(usize),
    #[error("variable {0} is already decimated")]
    AlreadyDecimated(usize),
    #[error("search space of {0} assignments exceeds the enumeration cap {1}")]
    EnumerationCap(u128, u128),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bad policy: {0}")]
    Policy(String),
    #[error("bad algorithm selector: {0}")]
    Selector(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unknown output format {0:?}")]
    Format(String),
    #[error("{context}: {source}")]
    Cell {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
