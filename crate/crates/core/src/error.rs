use std::fmt;

use thiserror::Error;

/// Diagnostic classes reported by the spec-file front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagCode {
    Syntax,
    Undeclared,
    Redeclared,
    Arity,
    Sort,
    SingleTime,
    NotGround,
    RuleShape,
    Header,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::Syntax => "E001-syntax",
            DiagCode::Undeclared => "E002-undeclared",
            DiagCode::Redeclared => "E003-redeclared",
            DiagCode::Arity => "E004-arity",
            DiagCode::Sort => "E005-sort",
            DiagCode::SingleTime => "E006-single-time",
            DiagCode::NotGround => "E007-not-ground",
            DiagCode::RuleShape => "E008-rule-shape",
            DiagCode::Header => "E009-header",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{line}:{col}: [{code}] {message}")]
    Parse {
        code: DiagCode,
        line: usize,
        col: usize,
        message: String,
    },

    #[error("[{code}] {message}")]
    Invalid { code: DiagCode, message: String },

    #[error("variable `{0}` is not covered by the substitution")]
    Unbound(String),

    #[error("rule `{0}` is not applicable under the given substitution")]
    NotApplicable(String),

    #[error("fact `{fact}` has size {size}, exceeding the declared bound k = {bound}")]
    FactSizeExceeded {
        fact: String,
        size: usize,
        bound: usize,
    },

    #[error("system is not progressive: {0}")]
    NotProgressive(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("generated system would have {count} rules, above the ceiling of {ceiling}; use a smaller grid or M")]
    TooManyRules { count: usize, ceiling: usize },

    #[error("report: {0}")]
    Report(String),

    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(code: DiagCode, message: impl Into<String>) -> Self {
        Error::Invalid {
            code,
            message: message.into(),
        }
    }

    /// Diagnostic code, when the error came from the front end.
    pub fn code(&self) -> Option<DiagCode> {
        match self {
            Error::Parse { code, .. } | Error::Invalid { code, .. } => Some(*code),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
