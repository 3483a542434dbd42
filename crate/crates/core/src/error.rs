use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sampling guard violated: {0}")]
    Sampling(String),

    #[error("invalid beam: {0}")]
    InvalidBeam(String),

    #[error("grid mismatch between fields")]
    GridMismatch,

    #[error("direction mismatch: {0}")]
    DirectionMismatch(String),

    #[error("field has zero power, azimuthal spectrum undefined")]
    UndefinedSpectrum,

    #[error("degenerate image: {0}")]
    DegenerateImage(String),

    #[error("invalid lens: {0}")]
    InvalidLens(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
