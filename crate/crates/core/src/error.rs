use thiserror::Error;

use crate::model::TagKind;

/// Errors raised by the context model, the context operators and the
/// context-set algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension `{0}` is already registered")]
    DuplicateDimension(String),
    #[error("`{0}` is not a valid dimension name")]
    InvalidDimensionName(String),
    #[error("ill-formed domain for dimension `{dim}`: {reason}")]
    IllFormedDomain { dim: String, reason: String },
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("tag `{tag}` has kind {found} but dimension `{dim}` expects {expected}")]
    TagTypeMismatch {
        dim: String,
        tag: String,
        expected: TagKind,
        found: String,
    },
    #[error("tag `{tag}` is outside the declared domain of dimension `{dim}`")]
    TagOutsideDomain { dim: String, tag: String },
    #[error("operator {op} requires a simple context, got {context}")]
    NonSimpleOperand { op: &'static str, context: String },
    #[error("choice needs at least one candidate")]
    EmptyChoice,
    #[error("dimension `{0}` has no stepped total order usable by a range operator")]
    UnorderedRangeDimension(String),
    #[error("range residue {0} is not a simple context")]
    NonSimpleResidue(String),
    #[error("context set members must be simple, got {0}")]
    NonSimpleMember(String),
    #[error("cannot enumerate Box: dimension `{0}` has no finite domain")]
    UnboundedBox(String),
    #[error("ill-typed Box predicate: {0}")]
    IllTypedPredicate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
