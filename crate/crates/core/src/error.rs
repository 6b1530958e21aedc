use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("n_s out of range: need at least one source antenna")]
    ZeroAntennas,

    #[error("kappa_s out of range: {0} (expected 0 <= kappa_s < 1)")]
    KappaSOutOfRange(f64),

    #[error("kappa_d out of range: {0} (expected 0 <= kappa_d < 1)")]
    KappaDOutOfRange(f64),

    #[error("p out of range: {0} W (transmit power must be positive)")]
    NonPositivePower(f64),

    #[error("sigma_n2 out of range: {0} W (noise power must be positive)")]
    NonPositiveNoise(f64),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("channel contains non-finite entries")]
    NonFiniteChannel,

    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("degenerate channel: composite channel vector is zero")]
    DegenerateChannel,

    #[error("phase vector entry {index} is not unit-modulus (|theta| = {modulus})")]
    NotUnitModulus { index: usize, modulus: f64 },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate})")]
    PowerIteration { estimate: f64, iterations: usize },

    #[error("elliptope projection did not converge after {iterations} iterations (residual {residual})")]
    ElliptopeProjection {
        residual: f64,
        iterations: usize,
        last: Box<crate::CMatrix>,
    },

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
