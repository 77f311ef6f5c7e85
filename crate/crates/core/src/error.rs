use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the model pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter failed validation (non-finite, negative, out of range).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The steady-state denominator of the cavity amplitudes vanished.
    #[error("singular operating point: steady-state denominator vanishes ({0})")]
    SingularOperatingPoint(String),

    /// Cavity elimination denominator K = kappa1*kappa2/4 - Lambda^2 is zero.
    #[error("singular elimination: kappa1*kappa2/4 - Lambda^2 = 0")]
    SingularElimination,

    /// The drift matrix is not strictly stable; no steady state exists.
    #[error("unstable drift matrix: max eigenvalue real part = {max_re:.3e}")]
    UnstableDrift { max_re: f64 },

    /// The Cramer-rule denominator is too close to zero to trust.
    #[error("near-marginal system: |det D| = {det:.3e} below tolerance {tol:.3e}")]
    NearMarginal { det: f64, tol: f64 },

    /// A linear solve or eigendecomposition failed.
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    /// A covariance matrix violates physicality (uncertainty principle or
    /// negative PPT radicand beyond rounding tolerance).
    #[error("unphysical state: {0}")]
    Unphysical(String),

    /// Operation called outside its supported parameter domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Unknown or unsupported sweep axis for the given base parameterization.
    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),

    /// The optimizer could not find any stable point in the search box.
    #[error("no feasible region: no stable point found on the pre-grid")]
    NoFeasibleRegion,
}
