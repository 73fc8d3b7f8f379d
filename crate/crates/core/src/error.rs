use thiserror::Error;

/// Errors surfaced by measure construction, transform evaluation, and the
/// convolution solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("density sample {index} is negative ({value})")]
    NegativeDensity { index: usize, value: f64 },
    #[error("density samples integrate to zero mass")]
    ZeroMass,
    #[error("grid has {got} nodes, need at least {need}")]
    GridTooSmall { got: usize, need: usize },
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("quantile level must lie in (0,1), got {0}")]
    QuantileOutOfRange(f64),
    #[error("smoothing parameter must be positive, got {0}")]
    NonPositiveEps(f64),
    #[error("evaluation point {0} is on or too close to the support")]
    TooCloseToSupport(f64),
    #[error("need at least {need} moments, got {got}")]
    TooFewMoments { got: usize, need: usize },
    #[error("moment/cumulant order {0} exceeds the supported truncation")]
    OrderTooLarge(usize),
    #[error("series did not converge at |s| = {0}")]
    SeriesNotConverged(f64),
    #[error("subordination solver diverged at z = {re} + {im}i (k = {k})")]
    SolverDiverged { re: f64, im: f64, k: f64 },
    #[error("convolution power requires k >= 1, got {0}")]
    KLessThanOne(f64),
    #[error("kernel evaluation point {0} lies on the support")]
    OnSupport(f64),
    #[error("gram points must be pairwise distinct")]
    DegeneratePoints,
    #[error("minor dimension {m} not in 1..={n}")]
    BadMinorDim { m: usize, n: usize },
    #[error("lagrangian arguments on the interlacing cone boundary (ratio {0})")]
    ConeBoundary(f64),
    #[error("lagrangian requires lambda_y > 0, got {0}")]
    NonPositiveLambdaY(f64),
    #[error("density vanishes on an interior interval; quantile map is ill-conditioned")]
    DisconnectedSupport,
    #[error("invalid run configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
