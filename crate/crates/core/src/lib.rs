//! Steady-state entanglement of two nanomechanical resonators in a doubly
//! resonant optomechanical cavity with an intracavity non-degenerate optical
//! parametric amplifier (NDOPA) and an injected broadband two-mode squeezed
//! vacuum reservoir.
//!
//! The crate models the red-detuned, resolved-sideband, weak-coupling regime
//! in which both cavity modes can be eliminated adiabatically, leaving two
//! coupled mechanical modes. The pipeline is
//!
//! 1. [`params`] — lab-unit or dimensionless system parameters, operating
//!    point (steady cavity amplitudes, many-photon couplings, cooperativity,
//!    reservoir moments);
//! 2. [`effective`] — effective two-resonator model after cavity elimination
//!    and its 4×4 drift/diffusion matrices;
//! 3. [`stability`] — Routh–Hurwitz conditions and eigenvalue checks;
//! 4. [`covariance`] — steady-state covariance from the Lyapunov equation,
//!    solved generically and through a Cramer-rule closed form;
//! 5. [`entanglement`] — logarithmic negativity of the bipartite mechanical
//!    Gaussian state;
//! 6. [`full_model`] — the pre-elimination 8×8 (two cavity + two mechanical
//!    mode) model, used to validate the adiabatic elimination;
//! 7. [`sweep`] / [`optimize`] — parameter grids, figure presets, and
//!    derivative-free maximization of the negativity.
//!
//! Quadratures are normalized so the vacuum variance is 1/2; the
//! entanglement bound correspondingly reads `2 V_s < 1`. All angular
//! frequencies are in rad/s.

pub mod covariance;
pub mod effective;
pub mod entanglement;
mod error;
pub mod full_model;
pub mod linalg;
pub mod optimize;
pub mod params;
pub mod pipeline;
pub mod stability;
pub mod sweep;

pub use covariance::{
    solve_covariance_cramer, solve_lyapunov_generic, symmetric_closed_form, CovarianceMatrix,
    CovarianceMethod,
};
pub use effective::{drift_matrix, EffectiveModel};
pub use entanglement::{
    log_negativity, min_symplectic_eigenvalue, symplectic_invariants, to_decibels,
    EntanglementResult, SymplecticInvariants,
};
pub use error::{Error, Result};
pub use full_model::{build_full_model, validate_elimination, EliminationReport, FullStateMatrices};
pub use optimize::{
    maximize_negativity, BoundedParam, OptimizeResult, OptimizeSpec, UnstableHandling,
};
pub use params::{
    derive_operating_point, reduce, reservoir_moments, thermal_occupancy, Drive, ModelParams,
    OperatingPoint, PhysicalParams, ReducedParams, HBAR, K_B,
};
pub use pipeline::{evaluate_model, PointEvaluation};
pub use stability::{eigenvalue_stability, routh_hurwitz, StabilityReport};
pub use sweep::{
    reproduce_figure, run_sweep, AxisSpec, FigureId, FigureReport, SignatureCheck, SweepBase,
    SweepParam, SweepRow, SweepSpec, SweepTable,
};
