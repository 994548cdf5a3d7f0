//! Error types shared by the analysis modules.

use std::fmt;

use crate::schema::{Attribute, AttributeSet};

/// A problem with user-supplied schema or decomposition input.
///
/// Validation reports every violation it finds, not just the first, so
/// callers collect these into a `Vec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationError {
    /// The attribute universe is empty.
    EmptyUniverse,
    /// An attribute name does not match `letter (letter | digit | '_')*`.
    BadAttributeName { name: String },
    /// A dependency has an empty left- or right-hand side.
    EmptyFdSide { fd: String },
    /// A dependency mentions an attribute missing from the universe.
    UnknownAttribute { fd: String, name: String },
    /// A decomposition's relations do not cover the whole universe.
    NotAttributePreserving { missing: AttributeSet },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::EmptyUniverse => write!(f, "attribute universe is empty"),
            ValidationError::BadAttributeName { name } => {
                write!(f, "bad attribute name {name:?}: expected a letter followed by letters, digits or underscores")
            }
            ValidationError::EmptyFdSide { fd } => {
                write!(f, "dependency {fd} has an empty side")
            }
            ValidationError::UnknownAttribute { fd, name } => {
                write!(f, "dependency {fd} mentions unknown attribute {name}")
            }
            ValidationError::NotAttributePreserving { missing } => {
                write!(f, "decomposition does not cover attributes {}", missing.braced())
            }
        }
    }
}

impl std::error::Error for ValidationError {}

/// Why a schema falls outside the class handled by the single-key,
/// two-component analyses (`analyze_case`, `theorem1_verdict`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssumptionViolation {
    /// More than one candidate key.
    MultipleCandidateKeys(Vec<AttributeSet>),
    /// The unique candidate key does not have exactly two attributes.
    KeyWidth { key: AttributeSet },
    /// One key component alone already determines every attribute.
    ComponentReachesUniverse { component: Attribute },
}

impl fmt::Display for AssumptionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionViolation::MultipleCandidateKeys(keys) => {
                write!(f, "schema has {} candidate keys (", keys.len())?;
                for (i, k) in keys.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", k.braced())?;
                }
                write!(f, "); exactly one is required")
            }
            AssumptionViolation::KeyWidth { key } => {
                write!(
                    f,
                    "candidate key {} has {} attributes; exactly two are required",
                    key.braced(),
                    key.len()
                )
            }
            AssumptionViolation::ComponentReachesUniverse { component } => {
                write!(f, "key component {component} alone determines every attribute")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// One or more input-validation failures.
    Validation(Vec<ValidationError>),
    /// An exponential search was asked to run past its configured bound.
    SizeLimitExceeded {
        operation: &'static str,
        size: usize,
        limit: usize,
    },
    /// The schema is not in the class the requested analysis covers.
    AssumptionViolated(AssumptionViolation),
    /// A rejection variant was requested for a schema with a different shape.
    VariantInapplicable { variant: String, reason: String },
    /// Instance generation needs an acyclic cover; these attributes sit on a cycle.
    CyclicCover { involved: Vec<Attribute> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(errs) => {
                write!(f, "invalid input")?;
                for e in errs {
                    write!(f, "\n  {e}")?;
                }
                Ok(())
            }
            Error::SizeLimitExceeded { operation, size, limit } => {
                write!(f, "{operation} over {size} attributes exceeds the configured limit of {limit}")
            }
            Error::AssumptionViolated(v) => write!(f, "{v}"),
            Error::VariantInapplicable { variant, reason } => {
                write!(f, "variant {variant} does not apply here: {reason}")
            }
            Error::CyclicCover { involved } => {
                write!(f, "dependency cover is cyclic around ")?;
                for (i, a) in involved.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for Error {}

impl From<AssumptionViolation> for Error {
    fn from(v: AssumptionViolation) -> Self {
        Error::AssumptionViolated(v)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
