use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: ‖M − M†‖ = {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("matrix is not anti-Hermitian: ‖A + A†‖ = {residual:.3e}")]
    NotAntiHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is not one: Tr = {trace:.15}")]
    TraceNotOne { trace: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("rank {rank} exceeds Hilbert-space dimension {dim}")]
    RankExceedsDimension { rank: usize, dim: usize },

    #[error("point is off the fiber: ‖Ψ†Ψ − P(σ)‖ = {residual:.3e}")]
    NotInFiber { residual: f64 },

    #[error("not a gauge algebra element: anti-Hermitian residual {antihermitian:.3e}, commutator residual {commutator:.3e}")]
    NotGaugeElement { antihermitian: f64, commutator: f64 },

    #[error("smallest eigenvalue {min_eigenvalue:.3e} is below the conditioning floor {floor:.1e}")]
    IllConditionedSpectrum { min_eigenvalue: f64, floor: f64 },

    #[error("invalid tolerances: {0}")]
    InvalidTolerance(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: horizontality residual {fine:.3e} did not shrink below {coarse:.3e} under refinement")]
    GridTooCoarse { fine: f64, coarse: f64 },

    #[error("geometric phase undefined: |Tr(Ψ0†Ψ‖)| = {modulus:.3e}")]
    PhaseUndefined { modulus: f64 },

    #[error("states are not isospectral: {left:?} vs {right:?}")]
    NotIsospectral { left: Vec<f64>, right: Vec<f64> },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Validation-class failures (bad inputs rather than numerical breakdown).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::GridTooCoarse { .. } | Error::PhaseUndefined { .. } | Error::Io(_)
        )
    }
}
