use thiserror::Error;

/// Errors raised by the geometric kernel and the bundle computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cone is not smooth: generator determinant is {det}, expected +/-1")]
    NonSmoothCone { det: String },
    #[error("cone is not full-dimensional ({got} generators in rank {rank})")]
    NotFullDimensional { got: usize, rank: usize },
    #[error("point lies outside the dual cone")]
    PointOutsideDualCone,
    #[error("region is empty")]
    EmptyRegion,
    #[error("region is unbounded and no bounding box was supplied")]
    UnboundedRegion,
    #[error("point is within tolerance of a region boundary; classification ambiguous")]
    BoundaryAmbiguous,
    #[error("fan is not complete: directions around {0:?} are uncovered")]
    IncompleteFan(Vec<i64>),
    #[error("operation not supported in fiber dimension {0} (certified for n = 2)")]
    UnsupportedDimension(usize),
    #[error("piecewise-linear data is inconsistent on the shared face of cones {0} and {1}")]
    InconsistentCartierData(usize, usize),
    #[error("weight calibration from the reference metric pairs is inconsistent")]
    InconsistentCalibration,
    #[error("class {0} is not nef; the weight would not be plurisubharmonic")]
    NefViolation(String),
    #[error("line bundle is not big")]
    NotBig,
    #[error("zero function has no multiplier-ideal membership")]
    ZeroFunction,
    #[error("mixed exact class representations: cannot build an exact nef constraint")]
    MixedClassFlavors,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
