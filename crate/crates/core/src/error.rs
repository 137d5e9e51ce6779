use thiserror::Error;

/// Errors raised by the solvers and diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("negative concentration {value} at r = {r}")]
    NegativeConcentration { r: f64, value: f64 },

    #[error("concentration {value} at r = {r} is below the floor {floor}")]
    ConcentrationBelowFloor { r: f64, value: f64, floor: f64 },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("eigensolver failed for mode k = {k}")]
    EigenFailure { k: i32 },

    #[error("no equilibrium: F(R) has no sign change on the scan grid")]
    NoEquilibrium { scan: Vec<(f64, f64)> },

    #[error("state violates the interface conditions (relative residual {residual:.3e} > {tol:.1e})")]
    Inadmissible { residual: f64, tol: f64 },

    #[error("positivity lost at t = {t}: c = {value} at r = {r}")]
    PositivityLoss { t: f64, r: f64, value: f64 },

    #[error("interface collision at t = {t}: R = {radius}")]
    InterfaceCollision { t: f64, radius: f64 },

    #[error("nonpositive norm {value} at t = {t} in fit window")]
    NonPositiveNorm { t: f64, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
