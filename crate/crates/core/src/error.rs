use thiserror::Error;

/// Failures raised by constructors and evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("singular configuration: {0}")]
    Singular(String),
    #[error("invalid branch: {0}")]
    InvalidBranch(String),
    #[error("supercritical coupling: |alpha Z| = {alpha_z} >= |kappa| = {kappa}")]
    Supercritical { alpha_z: f64, kappa: f64 },
    #[error("no bound state: {0}")]
    NoBoundState(String),
    #[error("level n = {n} exceeds n_max = {n_max}")]
    LevelCount { n: u32, n_max: u32 },
    #[error("non-normalizable: {0}")]
    NonNormalizable(String),
    #[error("excluded parameter: {0}")]
    ExcludedParameter(String),
    #[error("inconsistent branch: {0}")]
    InconsistentBranch(String),
    #[error("grid too small: {got} points, need at least {need}")]
    GridTooSmall { got: usize, need: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("term matching failed: {0}")]
    TermMismatch(String),
    #[error("difference is not constant: relative variance {0:e}")]
    NonConstant(f64),
    #[error("coordinate inversion failed: {0}")]
    Inversion(String),
    #[error("zero mass factor: lambda_3 must be nonzero")]
    ZeroMassFactor,
    #[error("requested {k} eigenvalues from an operator of size {n}")]
    EigenCount { k: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("{name} = {v}")))
    }
}
