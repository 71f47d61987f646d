use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("grading violation: {0}")]
    Grading(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operator does not square to zero: {0}")]
    NotSquareZero(String),
    #[error("integral absent")]
    IntegralAbsent,
    #[error("integral not nice: radical spanned by {radical:?}")]
    NotNice { radical: Vec<Vec<String>> },
    #[error("no unit class")]
    NoUnit,
    #[error("condition (iii) violated: {0}")]
    ConditionViolated(String),
    #[error("normalization failure at order {order}: Γ_n is not in the image of Δ")]
    NotInImageDelta { order: usize },
    #[error("closedness failure at order {order}: upstream structure is inconsistent")]
    NotClosed { order: usize },
    #[error("insufficient solve order: have {have}, need {need}")]
    InsufficientOrder { have: usize, need: usize },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("not a Poisson bivector: [w,w] != 0")]
    NotPoisson,
    #[error("degenerate form")]
    Degenerate,
    #[error("pipeline failure: {0}")]
    Pipeline(String),
}

pub type Result<T> = std::result::Result<T, Error>;
