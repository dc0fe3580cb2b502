//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Configuration rejected by an invariant check.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Argument outside the domain of an operation.
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// The free-particle response function has a pole at zero frequency.
    #[error(
        "response function has a static pole for a free particle (K = 0, omega = 0); \
             integrate against Im(alpha) paired with regular factors instead"
    )]
    FreeParticleStaticPole,

    /// Exponential-memory bath with complex relaxation roots (4*zeta*tau/m > 1).
    #[error("unsupported bath branch: 4*zeta*tau/m = {0} > 1 gives complex relaxation rates")]
    ComplexRoots(f64),

    /// A requested quantity is cutoff-dependent and no cutoff was configured.
    ///
    /// Vacuum fluctuations of the bath make the requested moment grow as
    /// (hbar/(pi*zeta)) * log(cutoff); a finite bath cutoff must be set to
    /// regularize it.
    #[error(
        "{what} is divergent at zero temperature without a bath cutoff: it grows as \
             (hbar/(pi*zeta))*log(cutoff) from bath zero-point fluctuations; set `cutoff` \
             in the bath configuration to regularize"
    )]
    Divergent { what: String },

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("singular denominator in {0}")]
    Singularity(String),

    #[error("covariance matrix is not positive semi-definite: {0}")]
    IndefiniteMatrix(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// ODE integration exceeded the step budget.
    #[error("stiff moment system: {0}; avoid very small relaxation times or shorten the horizon")]
    Stiffness(String),

    /// Requested time beyond the discrete bath recurrence time.
    #[error(
        "requested time {t} exceeds the discrete-bath recurrence window {t_rec} \
             (increase the number of modes or lower the cutoff)"
    )]
    RecurrenceExceeded { t: f64, t_rec: f64 },

    /// Decoherence-time fit requested outside its validity window.
    #[error("fit window error: {0}")]
    FitWindow(String),

    /// Grid integrator stability bound violated.
    #[error("stability violation: {0}")]
    Stability(String),

    /// Grid integrator lost probability mass.
    #[error("mass loss: |integral(W) - 1| = {0:.3e} exceeds 1e-4")]
    MassLoss(f64),
}
