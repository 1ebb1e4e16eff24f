use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid wavefunction: {0}")]
    InvalidWavefunction(String),

    #[error("grid too small: boundary amplitude {boundary:.3e} exceeds {limit:.1e} of peak")]
    GridTooSmall { boundary: f64, limit: f64 },

    #[error("support overflow: squeezing by r = {r} pushes the wavefunction past the grid edge")]
    SupportOverflow { r: f64 },

    #[error("characteristic function has not decayed: |chi({lambda})| = {value:.3e} >= {tol:.1e}")]
    Truncation { lambda: f64, value: f64, tol: f64 },

    #[error("normalization check failed: integral = {integral:.9} (tolerance {tol:.1e})")]
    Normalization { integral: f64, tol: f64 },

    #[error("negative spectral density {value:.3e} at mu = {mu} (aliasing)")]
    Aliasing { mu: f64, value: f64 },

    #[error("imaginary residue {residue:.3e} in spectral density exceeds {tol:.1e}")]
    ImaginaryResidue { residue: f64, tol: f64 },

    #[error("window captures probability {captured:.6}, below {required}")]
    Window { captured: f64, required: f64 },

    #[error("log grid underflow: lower cutoff u = {u_min:.1} is not representable")]
    LogGridUnderflow { u_min: f64 },

    #[error("distribution is in the absolute frame; an error-frame distribution is required")]
    Frame,

    #[error("invalid cost function: {0}")]
    Cost(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("sweep point nbar = {nbar} failed: {source}")]
    SweepPoint {
        nbar: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of a numerical-quality check (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::GridTooSmall { .. }
            | Error::SupportOverflow { .. }
            | Error::Truncation { .. }
            | Error::Normalization { .. }
            | Error::Aliasing { .. }
            | Error::ImaginaryResidue { .. }
            | Error::Window { .. }
            | Error::LogGridUnderflow { .. } => true,
            Error::SweepPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
