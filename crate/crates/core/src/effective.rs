//! Adiabatically eliminated two-resonator model and its state-space matrices.
//!
//! In the resolved-sideband, red-detuned, weak-coupling regime the cavity
//! fields follow the mirrors and can be eliminated, leaving
//!
//! ```text
//! d/dt d1 = -(Y1/2) d1 + chi d2^dag + sqrt(Y1) D1_in
//! d/dt d2 = -(Y2/2) d2 + chi d1^dag + sqrt(Y2) D2_in
//! ```
//!
//! with effective dampings `Y_j = gamma_j + Gamma_j`, optically induced
//! dampings `Gamma_1 = G1^2 kappa2 / K`, `Gamma_2 = G2^2 kappa1 / K`,
//! elimination denominator `K = kappa1 kappa2 / 4 - Lambda^2`, and coupling
//! `chi = (G1 G2 / K) Lambda e^{i theta}`. The quadrature state-space form
//! uses the ordering (Q1, P1, Q2, P2) with vacuum variance 1/2.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, OperatingPoint, ReducedParams};

/// The eliminated two-resonator model: effective rates, coupling, and the
/// noise coefficients feeding the diffusion matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    /// Effective mechanical dampings Y_j = gamma_j + Gamma_j (rad/s).
    pub upsilon: [f64; 2],
    /// Optically induced dampings Gamma_j (rad/s).
    pub optical_damping: [f64; 2],
    /// Elimination denominator K = kappa1 kappa2 / 4 - Lambda^2 (rad^2/s^2).
    pub kcal: f64,
    /// Effective mechanical coupling chi = (G1 G2 / K) Lambda e^{i theta}.
    pub chi: Complex64,
    /// Cavity-noise coefficients of mirror 1: a1 = i G1 kappa2 / (2K),
    /// b1 = i G1 Lambda e^{i theta} / K.
    pub a1: Complex64,
    pub b1: Complex64,
    /// Cavity-noise coefficients of mirror 2: a2 = i G2 kappa1 / (2K),
    /// b2 = i G2 Lambda e^{i theta} / K.
    pub a2: Complex64,
    pub b2: Complex64,
    /// True when K < 0 (beyond the parametric threshold); the model is then
    /// formally defined but dynamically unstable.
    pub beyond_threshold: bool,
    /// Carried inputs.
    pub params: ModelParams,
}

impl EffectiveModel {
    /// Build the eliminated model from linearized slow-frame parameters.
    ///
    /// Errors with [`Error::SingularElimination`] when `K = 0`. `K < 0`
    /// yields a beyond-threshold tagged model rather than an error.
    pub fn new(params: &ModelParams) -> Result<Self> {
        let [g1, g2] = params.coupling;
        let [k1, k2] = params.kappa;
        let [gm1, gm2] = params.gamma;
        for (name, v) in [
            ("coupling G1", g1),
            ("coupling G2", g2),
            ("lambda", params.lambda),
            ("nbar", params.nbar),
            ("occupancy n1", params.occupancy[0]),
            ("occupancy n2", params.occupancy[1]),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        for (name, v) in [("kappa1", k1), ("kappa2", k2), ("gamma1", gm1), ("gamma2", gm2)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }

        let kcal = k1 * k2 / 4.0 - params.lambda * params.lambda;
        if kcal == 0.0 {
            return Err(Error::SingularElimination);
        }
        let phase = Complex64::from_polar(1.0, params.theta);
        let gamma_opt = [g1 * g1 * k2 / kcal, g2 * g2 * k1 / kcal];
        Ok(Self {
            upsilon: [gm1 + gamma_opt[0], gm2 + gamma_opt[1]],
            optical_damping: gamma_opt,
            kcal,
            chi: (g1 * g2 / kcal) * params.lambda * phase,
            a1: Complex64::I * g1 * k2 / (2.0 * kcal),
            b1: Complex64::I * g1 * params.lambda * phase / kcal,
            a2: Complex64::I * g2 * k1 / (2.0 * kcal),
            b2: Complex64::I * g2 * params.lambda * phase / kcal,
            beyond_threshold: kcal < 0.0,
            params: params.clone(),
        })
    }

    pub fn from_operating_point(op: &OperatingPoint) -> Result<Self> {
        Self::new(&ModelParams::from_operating_point(op))
    }

    pub fn from_reduced(p: &ReducedParams) -> Result<Self> {
        Self::new(&ModelParams::from_reduced(p)?)
    }

    /// Drift matrix of the quadrature model (Q1, P1, Q2, P2).
    pub fn drift(&self) -> Matrix4<f64> {
        drift_matrix(self.upsilon[0], self.upsilon[1], self.chi)
    }

    /// Diffusion matrix of the quadrature model.
    ///
    /// Entries follow from the symmetrized delta-correlators of the effective
    /// input noises built on (N, M, n_j); the matrix is guarded to be
    /// symmetric positive semidefinite.
    pub fn diffusion(&self) -> Result<Matrix4<f64>> {
        let p = &self.params;
        let [k1, k2] = p.kappa;
        let [gm1, gm2] = p.gamma;
        let [n1, n2] = p.occupancy;
        let two_n1 = 2.0 * p.nbar + 1.0;
        let sqk = (k1 * k2).sqrt();
        let m = p.m_corr;

        let f11 = 0.5
            * ((self.a1.norm_sqr() * k1 + self.b1.norm_sqr() * k2) * two_n1
                + 4.0 * (self.a1 * self.b1.conj() * m).re * sqk
                + gm1 * (2.0 * n1 + 1.0));
        let f33 = 0.5
            * ((self.a2.norm_sqr() * k2 + self.b2.norm_sqr() * k1) * two_n1
                + 4.0 * (self.a2 * self.b2.conj() * m).re * sqk
                + gm2 * (2.0 * n2 + 1.0));
        let f13 = 0.5
            * (k1 * (self.a1 * self.b2).re + k2 * (self.a2 * self.b1).re)
            * two_n1
            + ((self.a1 * self.a2 + (self.b1 * self.b2).conj()) * m).re * sqk;
        let f14 = 0.5
            * (k1 * (self.a1 * self.b2).im + k2 * (self.a2 * self.b1).im)
            * two_n1
            + ((self.a1 * self.a2 - (self.b1 * self.b2).conj()) * m).im * sqk;

        let f = Matrix4::new(
            f11, 0.0, f13, f14, //
            0.0, f11, f14, -f13, //
            f13, f14, f33, 0.0, //
            f14, -f13, 0.0, f33,
        );

        let scale = f.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let min_eig = f
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, &v| acc.min(v));
        if min_eig < -1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Unphysical(format!(
                "diffusion matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(f)
    }
}

/// Drift matrix of the eliminated model for given effective dampings and
/// complex coupling (ordering Q1, P1, Q2, P2). The matrix is symmetric.
pub fn drift_matrix(upsilon1: f64, upsilon2: f64, chi: Complex64) -> Matrix4<f64> {
    let c = chi.re;
    let s = chi.im;
    Matrix4::new(
        -upsilon1 / 2.0, 0.0, c, s, //
        0.0, -upsilon1 / 2.0, s, -c, //
        c, s, -upsilon2 / 2.0, 0.0, //
        s, -c, 0.0, -upsilon2 / 2.0,
    )
}
