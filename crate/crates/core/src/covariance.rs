//! Steady-state covariance of the mechanical modes.
//!
//! Primary path: generic Lyapunov solve `B R + R B^T = -F` (extends
//! unchanged to the 8x8 full model). Cross-check paths: the Cramer-rule
//! closed form of the four independent entries, and — for the fully
//! symmetric case at theta = phi = 0 — closed determinant expressions that
//! bypass the 4x4 determinant routine entirely.
//!
//! The covariance inherits the structure
//!
//! ```text
//! R = [ R11  0    R13  R14
//!       0    R11  R14 -R13
//!       R13  R14  R33  0
//!       R14 -R13  0    R33 ]
//! ```
//!
//! which the generic solver is *verified* (not forced) to reproduce.

use nalgebra::{DMatrix, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::effective::EffectiveModel;
use crate::error::{Error, Result};
use crate::linalg::{self, LabeledMatrix, MECH_ORDERING};

/// Which route produced a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceMethod {
    GenericLyapunov,
    Cramer,
    SymmetricClosedForm,
}

/// Steady-state 4x4 mechanical covariance in (Q1, P1, Q2, P2) ordering,
/// vacuum variance 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub matrix: Matrix4<f64>,
    pub method: CovarianceMethod,
}

impl CovarianceMatrix {
    /// Independent entries of the structured form.
    pub fn entries(&self) -> (f64, f64, f64, f64) {
        let m = &self.matrix;
        (m[(0, 0)], m[(0, 2)], m[(0, 3)], m[(2, 2)])
    }

    /// Max deviation from the structured form, relative to the largest entry.
    /// Diagnostic only; expected at rounding level for every valid input.
    pub fn structure_residual(&self) -> f64 {
        let m = &self.matrix;
        let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
        let devs = [
            m[(1, 1)] - m[(0, 0)],
            m[(3, 3)] - m[(2, 2)],
            m[(0, 1)],
            m[(2, 3)],
            m[(1, 3)] + m[(0, 2)],
            m[(1, 2)] - m[(0, 3)],
        ];
        devs.iter().fold(0.0f64, |a, v| a.max(v.abs())) / scale
    }

    /// Symplectic eigenvalues (two, ascending).
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::symplectic_eigenvalues(&DMatrix::from_fn(4, 4, |i, j| self.matrix[(i, j)]))
    }

    pub fn to_labeled(&self) -> LabeledMatrix {
        LabeledMatrix::from_matrix4(&self.matrix, &MECH_ORDERING)
    }
}

fn assemble_structured(r11: f64, r13: f64, r14: f64, r33: f64) -> Matrix4<f64> {
    Matrix4::new(
        r11, 0.0, r13, r14, //
        0.0, r11, r14, -r13, //
        r13, r14, r33, 0.0, //
        r14, -r13, 0.0, r33,
    )
}

/// Solve the Lyapunov equation for the steady covariance with the generic
/// vectorized solver. Fails on an unstable drift; the returned matrix has
/// relative residual below [`linalg::LYAPUNOV_RESIDUAL_TOL`].
pub fn solve_lyapunov_generic(
    drift: &Matrix4<f64>,
    diffusion: &Matrix4<f64>,
) -> Result<CovarianceMatrix> {
    let b = DMatrix::from_fn(4, 4, |i, j| drift[(i, j)]);
    let f = DMatrix::from_fn(4, 4, |i, j| diffusion[(i, j)]);
    let r = linalg::solve_lyapunov(&b, &f)?;
    Ok(CovarianceMatrix {
        matrix: Matrix4::from_fn(|i, j| r[(i, j)]),
        method: CovarianceMethod::GenericLyapunov,
    })
}

/// Coefficient matrix of the reduced 4-unknown linear system for
/// (R11, R13, R14, R33); its determinant vanishes exactly at marginal
/// stability.
fn cramer_matrix(upsilon1: f64, upsilon2: f64, chi_re: f64, chi_im: f64) -> Matrix4<f64> {
    let c = chi_re;
    let s = chi_im;
    let half_sum = (upsilon1 + upsilon2) / 2.0;
    Matrix4::new(
        -upsilon1 / 2.0, c, s, 0.0, //
        c, -half_sum, 0.0, c, //
        s, 0.0, -half_sum, s, //
        0.0, c, s, -upsilon2 / 2.0,
    )
}

fn near_marginal_tol(m: &Matrix4<f64>) -> f64 {
    let max = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    1e-14 * max.powi(4)
}

/// Cramer-rule closed form: the structured Lyapunov equation reduces to a
/// 4x4 linear system; each unknown is a ratio of determinants
/// (LU with partial pivoting).
pub fn solve_covariance_cramer(
    model: &EffectiveModel,
    diffusion: &Matrix4<f64>,
) -> Result<CovarianceMatrix> {
    let dcal = cramer_matrix(model.upsilon[0], model.upsilon[1], model.chi.re, model.chi.im);
    let f11 = diffusion[(0, 0)];
    let f13 = diffusion[(0, 2)];
    let f14 = diffusion[(0, 3)];
    let f33 = diffusion[(2, 2)];
    let rhs = Vector4::new(-f11 / 2.0, -f13, -f14, -f33 / 2.0);

    let det = dcal.determinant();
    let tol = near_marginal_tol(&dcal);
    if det.abs() < tol {
        return Err(Error::NearMarginal { det, tol });
    }

    let mut unknowns = [0.0; 4];
    for (col, u) in unknowns.iter_mut().enumerate() {
        let mut dk = dcal;
        dk.set_column(col, &rhs);
        *u = dk.determinant() / det;
    }
    let [r11, r13, r14, r33] = unknowns;
    Ok(CovarianceMatrix {
        matrix: assemble_structured(r11, r13, r14, r33),
        method: CovarianceMethod::Cramer,
    })
}

/// Closed determinant expressions for the fully symmetric case
/// (`kappa1 = kappa2`, `gamma1 = gamma2`, `G1 = G2`, `n1 = n2`) at
/// `theta = 0`, `phi = 0`, where `Y1 = Y2 = Y` and `F33 = F11`:
///
/// ```text
/// det D1 = Y^3 F11 / 4 + |chi| Y^2 F13 / 2
/// det D2 = Y^3 F13 / 4 + |chi| Y^2 F11 / 2
/// det D3 = (Y^3 - 4 |chi|^2 Y) F14 / 4
/// det D4 = Y^3 F33 / 4 + |chi| Y^2 F13 / 2
/// det D  = Y^4 / 4 - |chi|^2 Y^2
/// ```
///
/// No 4x4 determinant routine is used. `det D` vanishes at marginal
/// stability, as the Cramer denominator must.
pub fn symmetric_closed_form(
    model: &EffectiveModel,
    diffusion: &Matrix4<f64>,
) -> Result<CovarianceMatrix> {
    let p = &model.params;
    let sym = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if !(sym(p.kappa[0], p.kappa[1])
        && sym(p.gamma[0], p.gamma[1])
        && sym(p.coupling[0], p.coupling[1])
        && sym(p.occupancy[0], p.occupancy[1]))
    {
        return Err(Error::Domain(
            "symmetric closed form requires kappa1 = kappa2, gamma1 = gamma2, G1 = G2, n1 = n2"
                .into(),
        ));
    }
    if p.theta != 0.0 || model.chi.im != 0.0 {
        return Err(Error::Domain("symmetric closed form requires theta = 0".into()));
    }
    if p.m_corr.im != 0.0 {
        return Err(Error::Domain("symmetric closed form requires phi = 0".into()));
    }

    let y = model.upsilon[0];
    let chi = model.chi.norm();
    let f11 = diffusion[(0, 0)];
    let f13 = diffusion[(0, 2)];
    let f14 = diffusion[(0, 3)];
    let f33 = diffusion[(2, 2)];

    let det = y.powi(4) / 4.0 - chi * chi * y * y;
    let tol = 1e-14 * (y / 2.0).max(chi).powi(4);
    if det.abs() < tol {
        return Err(Error::NearMarginal { det, tol });
    }
    let det1 = y.powi(3) * f11 / 4.0 + chi * y * y * f13 / 2.0;
    let det2 = y.powi(3) * f13 / 4.0 + chi * y * y * f11 / 2.0;
    let det3 = (y.powi(3) - 4.0 * chi * chi * y) * f14 / 4.0;
    let det4 = y.powi(3) * f33 / 4.0 + chi * y * y * f13 / 2.0;

    Ok(CovarianceMatrix {
        matrix: assemble_structured(det1 / det, det2 / det, det3 / det, det4 / det),
        method: CovarianceMethod::SymmetricClosedForm,
    })
}
