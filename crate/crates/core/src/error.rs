use thiserror::Error;

/// Errors raised by the renormalization toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenormError {
    #[error("point {re}{im:+}i lies outside the disc |z - {center}| <= {radius}")]
    DomainEscape {
        re: f64,
        im: f64,
        center: f64,
        radius: f64,
    },
    #[error("composition leaves the disc: sample at distance {distance} from center, radius {radius}")]
    ImageEscape { distance: f64, radius: f64 },
    #[error("recovered coefficients are ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("Fourier mode {k} outside the truncation |k| <= {max}")]
    ModeOutOfRange { k: i64, max: usize },
    #[error("minimum is degenerate; derivative of the minimum is undefined")]
    DegenerateMinimum,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("renormalized map is not in X: {0}")]
    NotInX(String),
    #[error("pair is not renormalizable at step {step}: {reason}")]
    NotRenormalizable { step: usize, reason: String },
    #[error("map is not on Sigma_1 (|G1| = {0:e})")]
    NotOnSigma1(f64),
    #[error("extremum of the slope numerator is degenerate")]
    DegenerateExtremum,
    #[error("slope denominator vanishes ({0:e}); transversality fails")]
    ZeroDenominator(f64),
    #[error("superstable window for level {0} not found")]
    WindowNotFound(usize),
    #[error("invariant curve is not attracting (Lyapunov exponent {lyapunov}, threshold {threshold})")]
    NonAttracting { lyapunov: f64, threshold: f64 },
    #[error("orbit escaped at theta = {theta}, x = {x}")]
    OrbitEscape { theta: f64, x: f64 },
    #[error("curve has period {found} instead of {expected}")]
    PeriodMismatch { expected: usize, found: usize },
    #[error("boundary root lost at eps = {eps}: {reason}")]
    RootLost { eps: f64, reason: String },
    #[error("linear algebra failure: {0}")]
    LinAlg(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid artifact: {0}")]
    Artifact(String),
}

pub type Result<T> = std::result::Result<T, RenormError>;
