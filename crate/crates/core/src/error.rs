use thiserror::Error;

/// A fatal problem in an input document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}:{line}: {message}")]
pub struct ParseError {
    pub file: String,
    /// 1-based line of the offending input.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(file: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        ParseError {
            file: file.into(),
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerializeError {
    #[error("corpus has structural errors: {0}")]
    Structural(String),
    #[error("{entity}: field `{field}` cannot be written in the block format ({reason})")]
    Unrepresentable {
        entity: String,
        field: &'static str,
        reason: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("EMPTY_DECOMPOSITION: no sub-concerns supplied")]
    EmptyDecomposition,
    #[error("DUP_NAME: a concern named `{0}` already exists")]
    DupName(String),
    #[error("UNKNOWN_PARENT: no concern `{0}`")]
    UnknownParent(String),
}

impl DecompositionError {
    pub fn code(&self) -> &'static str {
        match self {
            DecompositionError::EmptyDecomposition => "EMPTY_DECOMPOSITION",
            DecompositionError::DupName(_) => "DUP_NAME",
            DecompositionError::UnknownParent(_) => "UNKNOWN_PARENT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error("WRONG_KIND: expected a {expected} checklist, got {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("checklist target `{target}` is not aspect `{aspect}`")]
    TargetMismatch { target: String, aspect: String },
    #[error("gate config line {line}: {message}")]
    Config { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinerError {
    #[error("EMPTY_LEXICON: the action lexicon has no entries")]
    EmptyLexicon,
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("SELF_DEPENDENCY: aspect `{0}` depends on itself")]
    SelfDependency(String),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: cannot read input")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("no input paths given")]
    NoInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("UNKNOWN_FORMAT: `{0}` (expected text or json)")]
pub struct UnknownFormat(pub String);
