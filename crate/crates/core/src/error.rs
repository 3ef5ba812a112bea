use core::fmt;

/// Errors raised by the numerical routines.
///
/// Every variant is a validation failure of the inputs; numerical
/// non-convergence is reported through result flags, never through this type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch { expected: usize, found: usize },
    NotHermitian { deviation: f64 },
    NotDensity { min_eigenvalue: f64, trace: f64 },
    NotPure { purity: f64 },
    NotNormalized { norm: f64 },
    EmptyLayout,
    ZeroDimension,
    IndexOutOfRange { index: usize, len: usize },
    EmptySubset,
    InvalidRank { rank: usize, dim: usize },
    InvalidCut { cut: usize, parties: usize },
    TooFewParties { required: usize, found: usize },
    Domain { what: &'static str, value: f64 },
    LengthMismatch { expected: usize, found: usize },
    FullyTruncated,
    EmptySupport,
    InvalidSpectrum(&'static str),
    InvalidWeights(&'static str),
    InfeasibleEnergy { energy: f64, minimum: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:e})")
            }
            Error::NotDensity {
                min_eigenvalue,
                trace,
            } => write!(
                f,
                "not a density operator (min eigenvalue {min_eigenvalue:e}, trace {trace})"
            ),
            Error::NotPure { purity } => write!(f, "state is not pure (purity {purity})"),
            Error::NotNormalized { norm } => write!(f, "vector is not normalized (norm {norm})"),
            Error::EmptyLayout => f.write_str("subsystem layout has no parties"),
            Error::ZeroDimension => f.write_str("dimensions must be positive"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "party index {index} out of range for {len} parties")
            }
            Error::EmptySubset => f.write_str("subset of parties is empty"),
            Error::InvalidRank { rank, dim } => {
                write!(f, "rank {rank} is invalid for dimension {dim}")
            }
            Error::InvalidCut { cut, parties } => {
                write!(f, "cut {cut} is invalid for {parties} parties")
            }
            Error::TooFewParties { required, found } => {
                write!(f, "at least {required} parties required, found {found}")
            }
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::FullyTruncated => f.write_str("truncation projector annihilates the state"),
            Error::EmptySupport => f.write_str("state has empty support"),
            Error::InvalidSpectrum(why) => write!(f, "invalid spectrum: {why}"),
            Error::InvalidWeights(why) => write!(f, "invalid weight sequence: {why}"),
            Error::InfeasibleEnergy { energy, minimum } => write!(
                f,
                "energy bound {energy} is below the minimal product-state energy {minimum}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
