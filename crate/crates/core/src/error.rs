use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} exceeds the configured cap of {cap} (set CHAOSCORR_MAX_N to override)")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("site {site} is out of range for a {n_sites}-site system")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("site {0} appears more than once")]
    DuplicateSite(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("expected {expected} amplitudes, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("outcome {outcome} has vanishing probability {probability:e}")]
    ImpossibleOutcome { outcome: u8, probability: f64 },

    #[error("no eigenstate matches the selector: {0}")]
    EmptySelection(String),

    #[error("need at least {needed} levels, got {got}")]
    TooFewLevels { needed: usize, got: usize },

    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("eigenpair residual {residual:e} exceeds {tolerance:e}; the BLAS/LAPACK build is returning wrong results")]
    InaccurateEigenpairs { residual: f64, tolerance: f64 },
}
