//! Small dense linear-algebra helpers: the Lyapunov solver, symplectic
//! spectra, and labeled matrix serialization.

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative residual tolerance enforced on every Lyapunov solution.
pub const LYAPUNOV_RESIDUAL_TOL: f64 = 1e-10;

/// Largest eigenvalue real part of a square real matrix.
pub fn max_real_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalDegeneracy(
            "non-finite matrix entry in eigenvalue computation".into(),
        ));
    }
    let eig = m.clone().complex_eigenvalues();
    Ok(eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Infinity norm (max absolute entry) of a matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Relative residual `||B R + R B^T + F||_inf / ||F||_inf`.
pub fn lyapunov_residual(b: &DMatrix<f64>, r: &DMatrix<f64>, f: &DMatrix<f64>) -> f64 {
    let res = b * r + r * b.transpose() + f;
    max_abs(&res) / max_abs(f).max(f64::MIN_POSITIVE)
}

/// Solve the Lyapunov equation `B R + R B^T = -F` for a strictly stable `B`.
///
/// The equation is vectorized to an `n^2 x n^2` linear system
/// `(I (x) B + B (x) I) vec(R) = -vec(F)` and solved by LU with partial
/// pivoting; the result is symmetrized and its residual checked against
/// [`LYAPUNOV_RESIDUAL_TOL`].
pub fn solve_lyapunov(b: &DMatrix<f64>, f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = b.nrows();
    assert_eq!(b.ncols(), n, "drift matrix must be square");
    assert_eq!((f.nrows(), f.ncols()), (n, n), "diffusion must match drift");

    let max_re = max_real_eigenvalue(b)?;
    if max_re >= 0.0 {
        return Err(Error::UnstableDrift { max_re });
    }

    let id = DMatrix::<f64>::identity(n, n);
    let k = id.kronecker(b) + b.kronecker(&id);
    let rhs = DVector::from_iterator(n * n, f.iter().map(|v| -v));
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalDegeneracy("singular vectorized Lyapunov system".into()))?;
    let r = DMatrix::from_iterator(n, n, sol.iter().copied());
    let r = (&r + r.transpose()) * 0.5;

    let resid = lyapunov_residual(b, &r, f);
    if resid > LYAPUNOV_RESIDUAL_TOL {
        return Err(Error::NumericalDegeneracy(format!(
            "Lyapunov residual {resid:.3e} exceeds {LYAPUNOV_RESIDUAL_TOL:.1e}"
        )));
    }
    Ok(r)
}

/// Symplectic form for `n_modes` modes in (Q1, P1, Q2, P2, ...) ordering:
/// block-diagonal copies of `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for j in 0..n_modes {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of a `2n x 2n` covariance matrix: the moduli of the
/// (purely imaginary, paired) eigenvalues of `Omega R`, one per mode, sorted
/// ascending.
pub fn symplectic_eigenvalues(r: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = r.nrows();
    assert_eq!(dim % 2, 0, "covariance dimension must be even");
    let m = symplectic_form(dim / 2) * r;
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalDegeneracy(
            "non-finite entry in symplectic spectrum computation".into(),
        ));
    }
    let eig = m.complex_eigenvalues();
    let mut mods: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // eigenvalues come in +/- i nu pairs with equal modulus
    Ok(mods.iter().step_by(2).copied().collect())
}

/// A matrix with its quadrature-ordering labels, for JSON output
/// (row-major rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    pub ordering: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl LabeledMatrix {
    pub fn from_dmatrix(m: &DMatrix<f64>, ordering: &[&str]) -> Self {
        assert_eq!(m.nrows(), ordering.len());
        Self {
            ordering: ordering.iter().map(|s| s.to_string()).collect(),
            rows: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect(),
        }
    }

    pub fn from_matrix4(m: &Matrix4<f64>, ordering: &[&str; 4]) -> Self {
        Self::from_dmatrix(&DMatrix::from_fn(4, 4, |i, j| m[(i, j)]), ordering)
    }
}

/// Quadrature ordering of the reduced mechanical model.
pub const MECH_ORDERING: [&str; 4] = ["Q1", "P1", "Q2", "P2"];
/// Quadrature ordering of the full model: cavity modes first.
pub const FULL_ORDERING: [&str; 8] = [
    "Qc1", "Pc1", "Qc2", "Pc2", "Qm1", "Pm1", "Qm2", "Pm2",
];
