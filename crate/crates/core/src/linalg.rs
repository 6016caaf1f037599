use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Cross-moment condition number above which the normal equations are
/// abandoned for a QR solve.
pub const NORMAL_EQUATIONS_MAX_CONDITION: f64 = 1e10;
const QR_RANK_TOL: f64 = 1e-12;

/// Condition number of a symmetric positive semi-definite matrix.
pub fn spd_condition(g: &DMatrix<f64>) -> f64 {
    let eig = g.clone().symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `min ‖Z B − Y‖` column by column.
///
/// Uses a Cholesky factorization of `ZᵀZ` when it is well conditioned,
/// otherwise a QR decomposition of `Z`. Rank deficiency is reported as
/// [`Error::Collinear`].
pub fn least_squares(z: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = z.ncols();
    if z.nrows() < k {
        return Err(Error::SampleTooShort(format!("{} rows for {k} regressors", z.nrows())));
    }
    let g = z.transpose() * z;
    if spd_condition(&g) <= NORMAL_EQUATIONS_MAX_CONDITION {
        if let Some(chol) = g.cholesky() {
            return Ok(chol.solve(&(z.transpose() * y)));
        }
    }
    let qr = z.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || r.diagonal().iter().any(|v| v.abs() <= QR_RANK_TOL * scale) {
        return Err(Error::Collinear);
    }
    let qty = qr.q().transpose() * y;
    r.solve_upper_triangular(&qty).ok_or(Error::Collinear)
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if spd_condition(g) > 1e14 {
        return Err(Error::Collinear);
    }
    g.clone().cholesky().map(|c| c.inverse()).ok_or(Error::Collinear)
}
