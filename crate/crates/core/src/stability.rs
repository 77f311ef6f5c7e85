//! Routh–Hurwitz stability of the effective model.
//!
//! The characteristic polynomial of the drift matrix is
//! `l^4 + s1 l^3 + s2 l^2 + s3 l + s4` with
//!
//! ```text
//! s1 = Y1 + Y2
//! s2 = (Y1^2 + Y2^2 + 4 Y1 Y2 - 8 |chi|^2) / 4
//! s3 = (Y1 + Y2) (Y1 Y2 / 4 - |chi|^2)
//! s4 = (Y1 Y2 / 4 - |chi|^2)^2
//! ```
//!
//! and the three Hurwitz conditions reduce to
//!
//! ```text
//! h1 = Y1 Y2 / 4 - |chi|^2 > 0
//! h2 = (Y1 + Y2)(Y1^2 + Y2^2 + 3 Y1 Y2 - 4 |chi|^2) / 4 > 0
//! h3 = (Y1 + Y2) [h2 - (Y1 + Y2) h1] h1 > 0
//! ```
//!
//! None of these depend on the pump phase theta. In the gamma << Gamma limit
//! the boundary collapses to the simplified threshold
//! `Lambda < sqrt(kappa1 kappa2) / 2`.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::effective::EffectiveModel;
use crate::error::{Error, Result};

/// Margins within this tolerance of zero (in kappa-normalized units) are
/// reported unstable: the steady-state Lyapunov solution is not unique there.
pub const MARGINAL_TOL: f64 = 1e-12;

/// Stability verdict with the characteristic coefficients and Hurwitz
/// quantities, all normalized by powers of `kappa_bar = sqrt(kappa1 kappa2)`
/// so margins are comparable across sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Characteristic coefficients (s1..s4), kappa-normalized.
    pub s: [f64; 4],
    /// Hurwitz quantities (h1, h2, h3), kappa-normalized.
    pub h: [f64; 3],
    /// True when h1, h2, h3 all exceed [`MARGINAL_TOL`].
    pub stable: bool,
    /// min(h1, h2, h3) in normalized units; negative when unstable.
    pub margin: f64,
    /// Real parts of the four drift eigenvalues (rad/s), when computed.
    pub eigenvalue_real_parts: Option<[f64; 4]>,
}

fn hurwitz_coeffs(u1: f64, u2: f64, x2: f64) -> ([f64; 4], [f64; 3]) {
    let q = u1 * u2 / 4.0 - x2;
    let s = [
        u1 + u2,
        (u1 * u1 + u2 * u2 + 4.0 * u1 * u2 - 8.0 * x2) / 4.0,
        (u1 + u2) * q,
        q * q,
    ];
    let h1 = q;
    let h2 = 0.25 * (u1 + u2) * (u1 * u1 + u2 * u2 + 3.0 * u1 * u2 - 4.0 * x2);
    let h3 = (u1 + u2) * (h2 - (u1 + u2) * h1) * h1;
    (s, [h1, h2, h3])
}

/// Routh–Hurwitz conditions from raw effective rates.
///
/// The reported `s`/`h` are normalized by `kappa_bar` so they are comparable
/// across sweeps. The verdict and margin use the system's own rate scale
/// `max(|Y1|, |Y2|, 2|chi|)` instead: marginality is a property of the
/// dynamics, not of how slow the mechanics are relative to the cavity.
pub fn routh_hurwitz_rates(
    upsilon1: f64,
    upsilon2: f64,
    chi_abs: f64,
    kappa_bar: f64,
) -> StabilityReport {
    let (s, h) = hurwitz_coeffs(
        upsilon1 / kappa_bar,
        upsilon2 / kappa_bar,
        (chi_abs / kappa_bar).powi(2),
    );

    let rho = upsilon1
        .abs()
        .max(upsilon2.abs())
        .max(2.0 * chi_abs)
        .max(f64::MIN_POSITIVE);
    let (_, hv) = hurwitz_coeffs(upsilon1 / rho, upsilon2 / rho, (chi_abs / rho).powi(2));
    let margin = hv[0].min(hv[1]).min(hv[2]);
    StabilityReport {
        s,
        h,
        stable: margin > MARGINAL_TOL,
        margin,
        eigenvalue_real_parts: None,
    }
}

/// Routh–Hurwitz stability of an effective model.
pub fn routh_hurwitz(m: &EffectiveModel) -> StabilityReport {
    routh_hurwitz_rates(
        m.upsilon[0],
        m.upsilon[1],
        m.chi.norm(),
        m.params.kappa_bar(),
    )
}

/// Eigenvalue-based verdict on an arbitrary 4x4 drift matrix: stable iff
/// every eigenvalue real part is negative.
pub fn eigenvalue_stability(drift: &Matrix4<f64>) -> Result<StabilityReport> {
    if drift.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalDegeneracy(
            "non-finite drift entry in eigenvalue stability check".into(),
        ));
    }
    let d = DMatrix::from_fn(4, 4, |i, j| drift[(i, j)]);
    let eig = d.complex_eigenvalues();
    let mut re = [0.0; 4];
    for (k, z) in eig.iter().enumerate() {
        re[k] = z.re;
    }
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max_re = re[3];
    Ok(StabilityReport {
        s: [0.0; 4],
        h: [0.0; 3],
        stable: max_re < 0.0,
        margin: -max_re,
        eigenvalue_real_parts: Some(re),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::drift_matrix;
    use crate::params::{reservoir_moments, ModelParams};
    use num_complex::Complex64;
    use rand::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn uncoupled_damped_system_is_stable() {
        let rep = routh_hurwitz_rates(0.8, 1.2, 0.0, 1.0);
        assert!(rep.stable);
        assert!((rep.h[0] - 0.8 * 1.2 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn marginal_boundary_reported_unstable() {
        let (u1, u2) = (0.9, 1.7);
        let chi = f64::sqrt(u1 * u2) / 2.0;
        let rep = routh_hurwitz_rates(u1, u2, chi, 1.0);
        assert!(rep.h[0].abs() < 1e-14, "h1 vanishes on the boundary");
        assert!(!rep.stable);
    }

    #[test]
    fn theta_invariance_of_hurwitz_quantities() {
        // h_j depend on |chi| only; drift matrices at different theta share
        // the verdict and margins to machine precision.
        let kappa = 1.0;
        for theta in [0.0, PI / 7.0, PI / 3.0, PI / 2.0, PI] {
            let chi = Complex64::from_polar(0.21, theta);
            let rep = routh_hurwitz_rates(1.1, 0.6, chi.norm(), kappa);
            let ref_rep = routh_hurwitz_rates(1.1, 0.6, 0.21, kappa);
            for k in 0..3 {
                let rel = (rep.h[k] - ref_rep.h[k]).abs() / ref_rep.h[k].abs();
                assert!(rel < 1e-12, "h{} varies with theta", k + 1);
            }
            let eig = eigenvalue_stability(&drift_matrix(1.1, 0.6, chi)).unwrap();
            assert_eq!(eig.stable, rep.stable);
        }
    }

    #[test]
    fn symmetric_eigenvalues_are_rate_split() {
        let rep = eigenvalue_stability(&drift_matrix(1.0, 1.0, Complex64::new(0.3, 0.0))).unwrap();
        let re = rep.eigenvalue_real_parts.unwrap();
        assert!((re[0] + 0.8).abs() < 1e-12 && (re[1] + 0.8).abs() < 1e-12);
        assert!((re[2] + 0.2).abs() < 1e-12 && (re[3] + 0.2).abs() < 1e-12);
    }

    #[test]
    fn identity_drift_trivially_stable() {
        let rep = eigenvalue_stability(&(-Matrix4::identity())).unwrap();
        assert!(rep.stable);
        assert!(rep
            .eigenvalue_real_parts
            .unwrap()
            .iter()
            .all(|&r| (r + 1.0).abs() < 1e-14));
    }

    #[test]
    fn verdicts_agree_on_random_rates() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut disagreements = 0;
        for _ in 0..10_000 {
            let u1 = rng.random_range(1e-3..4.0);
            let u2 = rng.random_range(1e-3..4.0);
            let chi_abs = rng.random_range(0.0..1.2) * f64::sqrt(u1 * u2) / 2.0;
            let theta = rng.random_range(0.0..2.0 * PI);
            let rh = routh_hurwitz_rates(u1, u2, chi_abs, 1.0);
            let eig =
                eigenvalue_stability(&drift_matrix(u1, u2, Complex64::from_polar(chi_abs, theta)))
                    .unwrap();
            if rh.stable != eig.stable && rh.margin.abs() >= 1e-10 {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn simplified_threshold_in_strong_cooling_limit() {
        // gamma << Gamma symmetric: the stability boundary in Lambda sits at
        // kappa/2 to within the scan resolution of 1e-4 kappa.
        let kappa = 1.0;
        let gamma = 1e-7;
        let g = 0.1 * kappa;
        let mut last_stable = f64::NAN;
        let mut first_unstable = f64::NAN;
        let mut x = 0.49f64;
        while x <= 0.51 {
            let lambda = x * kappa;
            let kcal = kappa * kappa / 4.0 - lambda * lambda;
            if kcal.abs() > 1e-15 {
                let gam_opt = g * g * kappa / kcal;
                let ups = gamma + gam_opt;
                let chi = g * g * lambda / kcal;
                let rep = routh_hurwitz_rates(ups, ups, chi.abs(), kappa);
                if rep.stable {
                    last_stable = x;
                } else if first_unstable.is_nan() {
                    first_unstable = x;
                }
            }
            x += 1e-4;
        }
        assert!((last_stable - 0.5).abs() < 1e-3, "last stable at {last_stable}");
        assert!((first_unstable - 0.5).abs() < 1e-3);
        assert!(last_stable < first_unstable);
    }

    #[test]
    fn physical_models_agree_between_methods() {
        // Random physical-manifold draws (always stable below threshold, per
        // Gamma1 Gamma2 / 4 - |chi|^2 = G1^2 G2^2 / K > 0).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let kappa = [rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)];
            let kbar = f64::sqrt(kappa[0] * kappa[1]);
            let (nbar, m_corr) = reservoir_moments(rng.random_range(0.0..1.5), 0.0).unwrap();
            let p = ModelParams {
                coupling: [rng.random_range(0.001..0.15), rng.random_range(0.001..0.15)],
                kappa,
                gamma: [rng.random_range(1e-5..1e-2), rng.random_range(1e-5..1e-2)],
                lambda: rng.random_range(0.0..0.495) * kbar,
                theta: rng.random_range(0.0..2.0 * PI),
                nbar,
                m_corr,
                occupancy: [0.0, 0.0],
            };
            let m = crate::effective::EffectiveModel::new(&p).unwrap();
            let rh = routh_hurwitz(&m);
            assert!(rh.stable, "below-threshold physical model must be stable");
            let eig = eigenvalue_stability(&m.drift()).unwrap();
            assert!(eig.stable);
        }
    }
}
