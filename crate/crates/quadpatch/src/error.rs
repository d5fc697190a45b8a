use thiserror::Error;

/// Everything that can go wrong between reading a control net and reporting
/// its Euclidean elements.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("homogeneous vector has all coordinates zero")]
    ZeroVector,
    #[error("points are collinear; no unique plane passes through them")]
    CollinearInput,
    #[error("planes are dependent; they do not meet in a single point")]
    DependentPlanes,
    #[error("zero denominator while {0}")]
    ZeroDenominator(&'static str),
    #[error("polynomial has no nonzero coefficient of positive degree")]
    DegeneratePolynomial,
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
    #[error("barycentric coordinates ({0}, {1}, {2}) do not sum to one")]
    NotBarycentric(f64, f64, f64),
    #[error("boundary conics have no second common point")]
    NoSecondIntersection,
    #[error("not a quadric patch: {0}")]
    NotAQuadric(String),
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("inconsistent frame: {0}")]
    InconsistentFrame(String),
    #[error("frame forms are linearly dependent")]
    DependentForms,
    #[error("inconsistent classification: {0}")]
    Inconsistent(String),
    #[error("frame-adapted basis of the plane at infinity is degenerate")]
    DegenerateBasis,
    #[error("revolution tests disagree: {0}")]
    InconsistentDetection(String),
    #[error("surface is not a paraboloid")]
    NotAParaboloid,
    #[error("surface is not a cylinder")]
    NotACylinder,
    #[error("cannot read patch file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
