//! Vector autoregressions fitted equation by equation with least squares,
//! their moving-average representation and a companion-matrix stability check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::least_squares;

/// A fitted VAR(p) with intercept: `y_t = c + Σ_{k=1}^{p} Φ_k y_{t−k} + ε_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    pub p: usize,
    pub n: usize,
    /// `Φ_1 .. Φ_p`, each `n × n`.
    pub phi: Vec<DMatrix<f64>>,
    pub intercept: DVector<f64>,
    /// Residual covariance, divided by `t_eff`.
    pub sigma: DMatrix<f64>,
    /// `T_obs − p`.
    pub t_eff: usize,
    /// `t_eff × n`; empty for models built from parts.
    pub residuals: DMatrix<f64>,
}

impl VarModel {
    /// A model with known parameters, e.g. a data-generating process.
    pub fn from_parts(phi: Vec<DMatrix<f64>>, intercept: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let n = intercept.len();
        if phi.is_empty() {
            return Err(Error::InvalidArgument("a VAR needs at least one lag".into()));
        }
        if phi.iter().any(|m| m.shape() != (n, n)) || sigma.shape() != (n, n) {
            return Err(Error::InvalidArgument("inconsistent VAR dimensions".into()));
        }
        Ok(VarModel { p: phi.len(), n, phi, intercept, sigma, t_eff: 0, residuals: DMatrix::zeros(0, n) })
    }

    pub fn stability(&self) -> Stability {
        is_stable(self)
    }
}

/// Fits a VAR(p) to a `T × N` panel, optionally in logs.
pub fn fit_var(panel: &DMatrix<f64>, p: usize, log_transform: bool) -> Result<VarModel> {
    let (t_obs, n) = panel.shape();
    if p == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("invalid VAR shape: p={p}, N={n}")));
    }
    if t_obs <= n * p + p + 1 {
        return Err(Error::SampleTooShort(format!("{t_obs} observations for VAR({p}) in {n} variables")));
    }
    let data = if log_transform {
        if let Some((idx, v)) = panel.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            // column-major storage
            return Err(Error::LogDomain { row: idx % t_obs, col: idx / t_obs, value: *v });
        }
        panel.map(f64::ln)
    } else {
        panel.clone()
    };

    let t_eff = t_obs - p;
    let k = 1 + n * p;
    let z = DMatrix::from_fn(t_eff, k, |i, c| {
        if c == 0 {
            1.0
        } else {
            let lag = (c - 1) / n + 1;
            let var = (c - 1) % n;
            data[(p + i - lag, var)]
        }
    });
    let y = data.rows(p, t_eff).into_owned();
    let b = least_squares(&z, &y)?;
    let residuals = &y - &z * &b;
    let sigma = residuals.transpose() * &residuals / t_eff as f64;
    let sigma = (&sigma + sigma.transpose()) * 0.5;

    let intercept = b.row(0).transpose();
    let phi = (0..p)
        .map(|lag| b.rows(1 + lag * n, n).transpose())
        .collect();
    Ok(VarModel { p, n, phi, intercept, sigma, t_eff, residuals })
}

/// `Ψ_0 .. Ψ_H` of the moving-average representation.
#[derive(Debug, Clone, PartialEq)]
pub struct MaCoefficients {
    pub horizon: usize,
    pub psi: Vec<DMatrix<f64>>,
}

/// `Ψ_0 = I`, `Ψ_h = Σ_{k=1}^{min(h,p)} Φ_k Ψ_{h−k}`.
pub fn ma_coefficients(model: &VarModel, horizon: usize) -> MaCoefficients {
    let n = model.n;
    let mut psi: Vec<DMatrix<f64>> = Vec::with_capacity(horizon + 1);
    psi.push(DMatrix::identity(n, n));
    for h in 1..=horizon {
        let mut acc = DMatrix::zeros(n, n);
        for k in 1..=h.min(model.p) {
            acc += &model.phi[k - 1] * &psi[h - k];
        }
        psi.push(acc);
    }
    MaCoefficients { horizon, psi }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    /// Largest eigenvalue modulus of the companion matrix.
    pub radius: f64,
}

pub fn companion_matrix(model: &VarModel) -> DMatrix<f64> {
    let (n, p) = (model.n, model.p);
    let mut c = DMatrix::zeros(n * p, n * p);
    for (k, phi) in model.phi.iter().enumerate() {
        c.view_mut((0, k * n), (n, n)).copy_from(phi);
    }
    for i in n..n * p {
        c[(i, i - n)] = 1.0;
    }
    c
}

pub fn is_stable(model: &VarModel) -> Stability {
    let radius = companion_matrix(model)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Stability { stable: radius < 1.0, radius }
}
