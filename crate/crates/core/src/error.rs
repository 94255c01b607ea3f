use core::fmt;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors or balls live in different spatial dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// A scalar parameter is outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// A count or index parameter is outside its admissible range.
    InvalidCount { name: &'static str, value: usize },
    /// The prediction window length does not match the number of control balls.
    WindowLength { sigma: usize, controls: usize },
    /// Path gain is undefined at zero separation.
    ZeroDistance,
    /// Stability analysis needs at least one nonzero Laplacian eigenvalue.
    EmptySpectrum,
    /// Control topology is not connected.
    Disconnected,
    /// Control topology weights are not symmetric, nonnegative, or have a nonzero diagonal.
    InvalidTopology,
    /// The gain lies outside the Jury feasibility region for the topology.
    GainInfeasible { alpha: f64, beta: f64 },
    /// Estimation was asked to run backwards in time.
    NonCausal { snapshot: usize, current: usize },
    /// The power planner is missing information it needs about a control neighbor.
    MissingNeighborSnapshot { neighbor: usize },
    /// A noise draw fell outside its bounding ball.
    NoiseOutOfBounds { norm: f64, radius: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value {value} for parameter `{name}`")
            }
            Error::InvalidCount { name, value } => {
                write!(f, "invalid value {value} for `{name}`")
            }
            Error::WindowLength { sigma, controls } => write!(
                f,
                "prediction over {sigma} steps needs {sigma} control balls, got {controls}"
            ),
            Error::ZeroDistance => write!(f, "path gain is undefined at zero distance"),
            Error::EmptySpectrum => write!(f, "no positive Laplacian eigenvalues supplied"),
            Error::Disconnected => write!(f, "control topology is not connected"),
            Error::InvalidTopology => write!(
                f,
                "control topology must be symmetric, nonnegative, with zero diagonal"
            ),
            Error::GainInfeasible { alpha, beta } => write!(
                f,
                "gain (alpha={alpha}, beta={beta}) is outside the stability region"
            ),
            Error::NonCausal { snapshot, current } => write!(
                f,
                "cannot estimate step {current} from a later snapshot at step {snapshot}"
            ),
            Error::MissingNeighborSnapshot { neighbor } => {
                write!(f, "no snapshot received from control neighbor {neighbor}")
            }
            Error::NoiseOutOfBounds { norm, radius } => {
                write!(f, "noise norm {norm} exceeds bound {radius}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

pub(crate) fn check_nonneg(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}
