//! One error type for the whole crate; variants carry enough context to
//! diagnose a failure without re-running the computation.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("cannot differentiate with respect to parameter symbol {0}")]
    ParameterDifferentiation(String),

    #[error("antiderivative requested for an expression containing the fiber variable u")]
    ContainsFiberVariable,

    #[error("evaluation is not exact: exponential frequency {freq} in {var} requires {var} = 0, got {value}")]
    NonExactEvaluation {
        var: char,
        freq: String,
        value: String,
    },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("vector fields live on different spaces")]
    SpaceMismatch,

    #[error("field is not projectable: component {component} depends on u")]
    NotProjectable { component: char },

    #[error("declared inverse fails to verify: {0}")]
    NotInvertible(String),

    #[error("fiber degree too high for this map: u-degree {got}, maximum {max}")]
    DegreeTooHigh { got: usize, max: usize },

    #[error("not closed under bracket: [basis[{i}], basis[{j}]] = {bracket} is outside the span")]
    NotClosed { i: usize, j: usize, bracket: String },

    #[error("generators are linearly dependent over constants")]
    LinearlyDependent,

    #[error("not a lift: {0}")]
    NotALift(String),

    #[error("algebra is not transitive at the sample point")]
    NotTransitive,

    #[error("restricted stabilizer span is not an initial segment of {{du, u du, u^2 du}}")]
    NotNormalForm,

    #[error("no transitive normalized pair found in the search grid")]
    NoTransitivePair,

    #[error("unknown catalog id {0}")]
    UnknownId(String),

    #[error("invalid parameter for {id}: {constraint}")]
    InvalidParameter { id: String, constraint: String },

    #[error("truncation degree {got} is smaller than the generator coefficient degree {need}")]
    DegreeTooSmall { got: usize, need: usize },

    #[error("not a cocycle: equation for bracket ({i},{j}) leaves residue {residue}")]
    NotACocycle { i: usize, j: usize, residue: String },

    #[error("normalization leaves the coefficient ring: {0}")]
    OutsideRing(String),

    #[error("truncated template space exhausted: {0}")]
    TruncationExhausted(String),

    #[error("no lift of the requested type exists: {0}")]
    NoLift(String),

    #[error("branch enumeration failed; reduced basis: {basis:?}")]
    BranchEnumerationFailed { basis: Vec<String> },

    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
