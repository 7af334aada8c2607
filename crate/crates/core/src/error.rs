use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unsupported dimension {0}; only n = 2 and n = 3 are implemented")]
    UnsupportedDimension(usize),
    #[error("resolution {value} for {what} must be even")]
    OddResolution { what: &'static str, value: usize },
    #[error("resolution below minimum: {what} = {value} < {min}")]
    ResolutionTooLow { what: &'static str, value: usize, min: usize },
    #[error("field and grid do not match")]
    GridMismatch,
    #[error("degree {degree} exceeds the grid band limit {band_limit}")]
    DegreeOverflow { degree: usize, band_limit: usize },
    #[error("coefficient vector of length {len} does not describe a degree-{degree} expansion")]
    CoefficientLayout { len: usize, degree: usize },
    #[error("direction is not unit length (|u| = {norm})")]
    NonUnitDirection { norm: f64 },
    #[error("field has no spectral representation")]
    MissingSpectrum,
    #[error("support function is not positive (min h = {min})")]
    NotPositive { min: f64 },
    #[error("body is not strictly convex (min eigenvalue of the radii matrix = {min_eigenvalue})")]
    NotStrictlyConvex { min_eigenvalue: f64 },
    #[error("convexity lost after truncation (min eigenvalue {min_eigenvalue}, tail coefficient {tail})")]
    TruncationLostConvexity { min_eigenvalue: f64, tail: f64 },
    #[error("translation moves the origin outside the body (min h - x.u = {min})")]
    TranslationLeavesOrigin { min: f64 },
    #[error("point is not interior to the body (min h - x.u = {min})")]
    NotInterior { min: f64 },
    #[error("no common interior point for the requested base point")]
    NoCommonInteriorPoint,
    #[error("linear map is singular (det = {det})")]
    SingularMap { det: f64 },
    #[error("linear map is not unimodular (det = {det})")]
    NotUnimodular { det: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("exponent p = {p} outside the admissible range [{min}, inf)")]
    InvalidExponent { p: f64, min: f64 },
    #[error("body volume {volume} differs from the unit-ball volume {target}")]
    NotNormalized { volume: f64, target: f64 },
    #[error("body is not origin-symmetric (largest odd coefficient {max_odd})")]
    NotSymmetric { max_odd: f64 },
    #[error("check requires dimension {expected}, body has dimension {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("no valid body after {draws} draws ({detail})")]
    ValidityExhausted { draws: usize, detail: String },
    #[error("width deficit {0} is not in [0, 1)")]
    DeficitOutOfRange(f64),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
