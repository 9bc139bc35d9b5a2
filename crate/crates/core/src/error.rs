use thiserror::Error;

/// Errors raised by the geometric primitives, domain oracles and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} spatial dimensions, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector has no causal character")]
    ZeroVector,

    #[error("points are not causally related")]
    NotCausal,

    #[error("vector is not lightlike (|b(v,v)| = {defect:e})")]
    NotLightlike { defect: f64 },

    #[error("invalid projective interval ({lower}, {upper})")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("value {value} lies outside the interval ({lower}, {upper})")]
    OutsideInterval { value: f64, lower: f64, upper: f64 },

    #[error("points are not collinear within tolerance")]
    NotCollinear,

    #[error("point lies outside the open segment between the endpoints")]
    OutsideSegment,

    #[error("inversion is undefined on the lightcone of the origin")]
    OnLightcone,

    #[error("invalid conformal map: {0}")]
    InvalidMap(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("segment leaves the domain")]
    SegmentLeavesDomain,

    #[error("cosmological time is infinite")]
    InfiniteTime,

    #[error("chain graph is disconnected between the endpoints; refine the mesh or widen the margin")]
    Disconnected,

    #[error("pseudo-distance degenerate: the domain contains a complete lightlike line")]
    Degenerate,

    #[error("invalid time function: {0}")]
    InvalidTimeFunction(String),

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("boundary feature not present: {0}")]
    FeatureAbsent(String),

    #[error("mesh too large: {nodes} nodes exceeds the budget of {budget}")]
    MeshTooLarge { nodes: usize, budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
