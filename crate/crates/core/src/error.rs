use thiserror::Error;

/// Broad failure category, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad parameters, parse failures, violated preconditions.
    Input,
    /// The design lattice has no feasible point.
    Infeasible,
    /// A computation hit a zero denominator or a collapsed geometry.
    Degenerate,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid triangular fuzzy number ({l}, {m}, {u}): {reason}")]
    InvalidTriangle {
        l: f64,
        m: f64,
        u: f64,
        reason: &'static str,
    },

    #[error("invalid interval type-2 fuzzy number: {0}")]
    InvalidIntervalType2(String),

    #[error("multiplication requires nonnegative parameters, found {0}")]
    NegativeParameter(f64),

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),

    #[error("degenerate footprint of uncertainty: {0}")]
    DegenerateFou(&'static str),

    #[error(
        "polygon area {area:e} is too small for a geometric centroid; \
         the footprint has collapsed, use the Nie-Tan method instead"
    )]
    DegeneratePolygon { area: f64 },

    #[error("Karnik-Mendel iteration did not reach a fixed switch point after {0} steps")]
    NoConvergence(usize),

    #[error("value {value} lies outside the generation support [{a}, {b}]")]
    OutsideSupport { value: f64, a: f64, b: f64 },

    #[error("invalid generation bounds: need 0 < a < b < 1, got a={a}, b={b}")]
    InvalidSupport { a: f64, b: f64 },

    #[error("random draw {0} outside [0, 1]")]
    InvalidDraw(f64),

    #[error("reliability must lie strictly inside (0, 1), got {0}")]
    InvalidReliability(f64),

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("dimension mismatch: instance has {expected} subsystems, design has {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("design lattice has {size} points, above the enumeration budget of {budget}; reduce the redundancy caps")]
    BudgetExceeded { size: u128, budget: u64 },

    #[error("no feasible design satisfies the volume, weight and redundancy constraints")]
    EmptyFeasibleRegion,

    #[error("degenerate normalization for {objective}: {detail}")]
    DegenerateObjective {
        objective: &'static str,
        detail: String,
    },

    #[error("invalid method parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "infeasible classification: at least one objective must be improved \
         (improve or aspiration) and at least one allowed to worsen (bound or free)"
    )]
    InfeasibleClassification,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::EmptyFeasibleRegion => ErrorKind::Infeasible,
            Error::DegenerateFou(_)
            | Error::DegeneratePolygon { .. }
            | Error::NoConvergence(_)
            | Error::DegenerateObjective { .. } => ErrorKind::Degenerate,
            _ => ErrorKind::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
