use thiserror::Error;

use crate::syntax::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("sort error in `{subterm}`: {message}")]
    Sort { subterm: String, message: String },
}

impl SyntaxError {
    pub(crate) fn parse(pos: usize, message: impl Into<String>) -> Self {
        SyntaxError::Parse {
            pos,
            message: message.into(),
        }
    }

    pub(crate) fn sort(subterm: &Term, message: impl Into<String>) -> Self {
        SyntaxError::Sort {
            subterm: subterm.to_string(),
            message: message.into(),
        }
    }
}

/// Errors raised by the semantic layers (evaluation, decomposition, coding).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticError {
    #[error("assignment does not cover free variable `{0}`")]
    PartialAssignment(String),
    #[error("expected a quantifier-free formula")]
    NotQuantifierFree,
    #[error("formula must have exactly one free variable of sort {expected} besides the parameters, found {found}")]
    BadFreeVariable { expected: String, found: String },
    #[error("point does not belong to the set")]
    NotInSet,
    #[error("point is not interior to the set: it lies in the exceptional set")]
    NotInteriorPoint,
    #[error("formula does not define a total function")]
    NotAFunction,
    #[error("function regions do not exhaust the domain")]
    ExhaustivenessFailure,
    #[error("empty interval: lower endpoint is not below the upper endpoint")]
    EmptyInterval,
    #[error("{0}")]
    Element(String),
    #[error("backend `{backend}` does not support n = {n}")]
    UnsupportedSorts { backend: &'static str, n: usize },
}
