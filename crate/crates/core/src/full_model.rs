//! Pre-elimination linearized model: two cavity and two mechanical modes
//! under the rotating-wave approximation at the red-detuned operating point
//! (`Delta_j = Omega_j`) with the pump matched to `Delta_p = Delta1 + Delta2`.
//!
//! The slow-frame equations are
//!
//! ```text
//! d/dt dc_j = -(kappa_j/2) dc_j + i G_j dd_j + Lambda e^{i theta} dc_k^dag + sqrt(kappa_j) c_j_in
//! d/dt dd_j = -(gamma_j/2) dd_j + i G_j dc_j + sqrt(gamma_j) d_j_in          (k != j)
//! ```
//!
//! rendered in quadratures over (Qc1, Pc1, Qc2, Pc2, Qm1, Pm1, Qm2, Pm2).
//! Solving the 8x8 Lyapunov problem and extracting the mechanical block
//! validates the adiabatic elimination behind the reduced model.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::covariance::{CovarianceMatrix, CovarianceMethod};
use crate::effective::EffectiveModel;
use crate::entanglement::log_negativity;
use crate::error::{Error, Result};
use crate::linalg::{self, LabeledMatrix, FULL_ORDERING};
use crate::params::ModelParams;
use crate::stability::routh_hurwitz;

/// 8x8 drift and diffusion of the four-mode model, cavity quadratures first.
#[derive(Debug, Clone, PartialEq)]
pub struct FullStateMatrices {
    pub drift: DMatrix<f64>,
    pub diffusion: DMatrix<f64>,
}

impl FullStateMatrices {
    pub fn drift_labeled(&self) -> LabeledMatrix {
        LabeledMatrix::from_dmatrix(&self.drift, &FULL_ORDERING)
    }

    pub fn diffusion_labeled(&self) -> LabeledMatrix {
        LabeledMatrix::from_dmatrix(&self.diffusion, &FULL_ORDERING)
    }
}

/// Assemble the RWA four-mode drift and diffusion matrices.
pub fn build_full_model(p: &ModelParams) -> Result<FullStateMatrices> {
    // reuse the parameter validation of the effective-model constructor
    EffectiveModel::new(p)?;
    let [g1, g2] = p.coupling;
    let [k1, k2] = p.kappa;
    let [gm1, gm2] = p.gamma;
    let (ct, st) = (p.theta.cos(), p.theta.sin());
    let lam = p.lambda;

    let mut a = DMatrix::zeros(8, 8);
    // cavity 1: -(k1/2) X1 + Lambda (ct X2 + st Y2) - G1 Pm1
    a[(0, 0)] = -k1 / 2.0;
    a[(0, 2)] = lam * ct;
    a[(0, 3)] = lam * st;
    a[(0, 5)] = -g1;
    a[(1, 1)] = -k1 / 2.0;
    a[(1, 2)] = lam * st;
    a[(1, 3)] = -lam * ct;
    a[(1, 4)] = g1;
    // cavity 2
    a[(2, 2)] = -k2 / 2.0;
    a[(2, 0)] = lam * ct;
    a[(2, 1)] = lam * st;
    a[(2, 7)] = -g2;
    a[(3, 3)] = -k2 / 2.0;
    a[(3, 0)] = lam * st;
    a[(3, 1)] = -lam * ct;
    a[(3, 6)] = g2;
    // mirror 1: -(gm1/2) Qm1 - G1 Y1 ; -(gm1/2) Pm1 + G1 X1
    a[(4, 4)] = -gm1 / 2.0;
    a[(4, 1)] = -g1;
    a[(5, 5)] = -gm1 / 2.0;
    a[(5, 0)] = g1;
    // mirror 2
    a[(6, 6)] = -gm2 / 2.0;
    a[(6, 3)] = -g2;
    a[(7, 7)] = -gm2 / 2.0;
    a[(7, 2)] = g2;

    // diffusion: cavity quadrature noise carries the squeezed reservoir,
    // mechanical noise the bath occupancies.
    let mut f = DMatrix::zeros(8, 8);
    let nhalf = p.nbar + 0.5;
    let (mre, mim) = (p.m_corr.re, p.m_corr.im);
    f[(0, 0)] = k1 * nhalf;
    f[(1, 1)] = k1 * nhalf;
    f[(2, 2)] = k2 * nhalf;
    f[(3, 3)] = k2 * nhalf;
    let sqk = (k1 * k2).sqrt();
    f[(0, 2)] = sqk * mre;
    f[(0, 3)] = sqk * mim;
    f[(1, 2)] = sqk * mim;
    f[(1, 3)] = -sqk * mre;
    f[(2, 0)] = f[(0, 2)];
    f[(3, 0)] = f[(0, 3)];
    f[(2, 1)] = f[(1, 2)];
    f[(3, 1)] = f[(1, 3)];
    f[(4, 4)] = gm1 * (p.occupancy[0] + 0.5);
    f[(5, 5)] = gm1 * (p.occupancy[0] + 0.5);
    f[(6, 6)] = gm2 * (p.occupancy[1] + 0.5);
    f[(7, 7)] = gm2 * (p.occupancy[1] + 0.5);

    Ok(FullStateMatrices { drift: a, diffusion: f })
}

/// Steady covariance of the full model (8x8).
pub fn full_steady_covariance(p: &ModelParams) -> Result<DMatrix<f64>> {
    let m = build_full_model(p)?;
    linalg::solve_lyapunov(&m.drift, &m.diffusion)
}

/// Comparison between the full four-mode model and the eliminated
/// two-mode model at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationReport {
    /// G_j / kappa_j, the elimination small parameters.
    pub coupling_ratio: [f64; 2],
    /// Max |R_full - R_reduced| over the mechanical block, relative to the
    /// largest mechanical-block entry.
    pub max_cov_deviation: f64,
    pub e_n_full: f64,
    pub e_n_reduced: f64,
    /// |E_N(full) - E_N(reduced)| / max(E_N(full), 1e-6).
    pub e_n_deviation: f64,
    /// Minimum symplectic eigenvalue of the 8x8 covariance.
    pub full_nu_min: f64,
    pub reduced_stable: bool,
    pub full_stable: bool,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

/// Solve both models and compare mechanical covariances and negativities.
///
/// The elimination is controlled in the weak-coupling regime
/// `G_j <= 0.1 kappa_j`; the deviation shrinks with `G/kappa` and the report
/// carries whether it met `tol`.
pub fn validate_elimination(p: &ModelParams, tol: f64) -> Result<EliminationReport> {
    let model = EffectiveModel::new(p)?;
    let rh = routh_hurwitz(&model);

    let full = build_full_model(p)?;
    let full_stable = linalg::max_real_eigenvalue(&full.drift)? < 0.0;
    if !full_stable {
        return Err(Error::UnstableDrift {
            max_re: linalg::max_real_eigenvalue(&full.drift)?,
        });
    }
    if rh.stable != full_stable {
        return Err(Error::NumericalDegeneracy(format!(
            "stability verdicts disagree: reduced {} vs full {}",
            rh.stable, full_stable
        )));
    }

    let r_full = linalg::solve_lyapunov(&full.drift, &full.diffusion)?;
    let mech = r_full.view((4, 4), (4, 4)).into_owned();
    let full_nu_min = linalg::symplectic_eigenvalues(&r_full)?[0];

    let f = model.diffusion()?;
    let r_red = crate::covariance::solve_lyapunov_generic(&model.drift(), &f)?;

    let scale = mech.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut max_dev = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            max_dev = max_dev.max((mech[(i, j)] - r_red.matrix[(i, j)]).abs());
        }
    }
    let max_cov_deviation = max_dev / scale.max(f64::MIN_POSITIVE);

    let mech_cov = CovarianceMatrix {
        matrix: nalgebra::Matrix4::from_fn(|i, j| mech[(i, j)]),
        method: CovarianceMethod::GenericLyapunov,
    };
    let e_n_full = log_negativity(&mech_cov)?.e_n;
    let e_n_reduced = log_negativity(&r_red)?.e_n;
    let e_n_deviation = (e_n_full - e_n_reduced).abs() / e_n_full.max(1e-6);

    Ok(EliminationReport {
        coupling_ratio: [p.coupling[0] / p.kappa[0], p.coupling[1] / p.kappa[1]],
        max_cov_deviation,
        e_n_full,
        e_n_reduced,
        e_n_deviation,
        full_nu_min,
        reduced_stable: rh.stable,
        full_stable,
        tolerance: tol,
        within_tolerance: max_cov_deviation <= tol && e_n_deviation <= tol,
    })
}
