//! Generalized forecast-error variance decompositions and the connectedness
//! measures built on them.
//!
//! For horizon `H` the generalized decomposition is
//!
//! ```text
//! θ_jk = σ_kk⁻¹ Σ_{h=0}^{H} ((Ψ_h Σ)_jk)²  /  Σ_{h=0}^{H} (Ψ_h Σ Ψ_hᵀ)_jj
//! ```
//!
//! Rows of `θ` are then normalized to one. The sum runs over `h = 0..=H`, so
//! horizon 12 uses thirteen moving-average terms.
//!
//! Directional measures are reported as percentages of raw row and column
//! sums: `FROM_j = 100 Σ_{k≠j} θ̃_jk`, `TO_j = 100 Σ_{k≠j} θ̃_kj`. The total
//! index divides the off-diagonal mass by `N`, so it equals the mean of
//! `FROM` (and of `TO`).

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::var_engine::{ma_coefficients, VarModel};
use crate::vol_index::Flavor;

#[derive(Debug, Clone, PartialEq)]
pub struct FevdTable {
    pub horizon: usize,
    pub names: Vec<String>,
    /// Before row normalization; rows need not sum to one.
    pub theta_raw: DMatrix<f64>,
    /// Row-normalized shares.
    pub theta: DMatrix<f64>,
}

impl FevdTable {
    /// Row-normalizes a non-negative square matrix of variance shares.
    pub fn from_raw(theta_raw: DMatrix<f64>, names: Vec<String>, horizon: usize) -> Result<Self> {
        let n = theta_raw.nrows();
        if theta_raw.ncols() != n || names.len() != n {
            return Err(Error::InvalidArgument(format!(
                "decomposition is {}x{} with {} names",
                n,
                theta_raw.ncols(),
                names.len()
            )));
        }
        if theta_raw.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument("variance shares must be finite and non-negative".into()));
        }
        let mut theta = theta_raw.clone();
        for (j, mut row) in theta.row_iter_mut().enumerate() {
            let s = row.sum();
            if s <= 0.0 {
                return Err(Error::InvalidArgument(format!("row {j} of the decomposition sums to zero")));
            }
            row /= s;
        }
        Ok(FevdTable { horizon, names, theta_raw, theta })
    }

    pub fn n(&self) -> usize {
        self.theta.nrows()
    }
}

/// Default axis labels `y1..yN`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("y{i}")).collect()
}

/// Generalized variance decomposition of `model` at horizon `horizon`.
pub fn gfevd(model: &VarModel, horizon: usize, names: &[String]) -> Result<FevdTable> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let n = model.n;
    let sigma = &model.sigma;
    if let Some(k) = (0..n).find(|&k| !(sigma[(k, k)] > 0.0)) {
        return Err(Error::DegenerateVariance(k));
    }
    let ma = ma_coefficients(model, horizon);
    let mut num = DMatrix::zeros(n, n);
    let mut den = DVector::zeros(n);
    for psi in &ma.psi {
        let ps = psi * sigma;
        num += ps.map(|v| v * v);
        // diag(Ψ Σ Ψᵀ)_j = Σ_k (ΨΣ)_jk Ψ_jk
        den += ps.component_mul(psi).column_sum();
    }
    let theta_raw = DMatrix::from_fn(n, n, |j, k| num[(j, k)] / sigma[(k, k)] / den[j]);
    let names = if names.len() == n { names.to_vec() } else { default_names(n) };
    FevdTable::from_raw(theta_raw, names, horizon)
}

/// Connectedness measures for one flavor, in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectednessSummary {
    pub flavor: Flavor,
    pub names: Vec<String>,
    pub total: f64,
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub net: Vec<f64>,
    /// `pairwise[j][k] = 100 (θ̃_kj − θ̃_jk)`.
    pub pairwise: DMatrix<f64>,
    /// `100 θ̃`, the layout printed in the connectedness table.
    pub shares: DMatrix<f64>,
}

pub fn summarize(table: &FevdTable, flavor: Flavor) -> ConnectednessSummary {
    let n = table.n();
    let theta = &table.theta;
    let from: Vec<f64> = (0..n)
        .map(|j| 100.0 * (0..n).filter(|&k| k != j).map(|k| theta[(j, k)]).sum::<f64>())
        .collect();
    let to: Vec<f64> = (0..n)
        .map(|j| 100.0 * (0..n).filter(|&k| k != j).map(|k| theta[(k, j)]).sum::<f64>())
        .collect();
    let net = to.iter().zip(&from).map(|(t, f)| t - f).collect();
    let off_diagonal: f64 = theta.sum() - theta.trace();
    let total = 100.0 * off_diagonal / n as f64;
    let pairwise = DMatrix::from_fn(n, n, |j, k| 100.0 * (theta[(k, j)] - theta[(j, k)]));
    ConnectednessSummary {
        flavor,
        names: table.names.clone(),
        total,
        from,
        to,
        net,
        pairwise,
        shares: theta * 100.0,
    }
}

impl ConnectednessSummary {
    /// Writes the square share table with a FROM column and TO/NET rows;
    /// the bottom-right cell holds the total. `decimals = None` writes full
    /// precision.
    pub fn write_table<W: Write>(&self, writer: W, decimals: Option<usize>) -> Result<()> {
        let fmt = |v: f64| match decimals {
            Some(d) => format!("{v:.d$}"),
            None => v.to_string(),
        };
        let n = self.names.len();
        let mut w = csv::Writer::from_writer(writer);
        let map = |e| Error::csv("<output>", e);
        let mut header = vec![String::new()];
        header.extend(self.names.iter().cloned());
        header.push("FROM".into());
        w.write_record(&header).map_err(map)?;
        for j in 0..n {
            let mut row = vec![self.names[j].clone()];
            row.extend((0..n).map(|k| fmt(self.shares[(j, k)])));
            row.push(fmt(self.from[j]));
            w.write_record(&row).map_err(map)?;
        }
        let mut to = vec!["TO".to_string()];
        to.extend(self.to.iter().map(|v| fmt(*v)));
        to.push("TOTAL".into());
        w.write_record(&to).map_err(map)?;
        let mut net = vec!["NET".to_string()];
        net.extend(self.net.iter().map(|v| fmt(*v)));
        net.push(fmt(self.total));
        w.write_record(&net).map_err(map)?;
        w.flush().map_err(|e| Error::io("<output>", e))
    }
}

/// Asymmetric fear connectedness: call-side minus put-side.
#[derive(Debug, Clone, PartialEq)]
pub struct AfcReport {
    pub names: Vec<String>,
    /// `C⁺ − C⁻`.
    pub afc_total: f64,
    pub net_pos: Vec<f64>,
    pub net_neg: Vec<f64>,
    pub afc_net: Vec<f64>,
}

pub fn afc(pos: &ConnectednessSummary, neg: &ConnectednessSummary) -> Result<AfcReport> {
    if pos.flavor != Flavor::Positive || neg.flavor != Flavor::Negative {
        return Err(Error::SummaryMismatch(format!(
            "expected positive and negative summaries, got {} and {}",
            pos.flavor, neg.flavor
        )));
    }
    if pos.names != neg.names {
        return Err(Error::SummaryMismatch("name axes differ".into()));
    }
    Ok(AfcReport {
        names: pos.names.clone(),
        afc_total: pos.total - neg.total,
        net_pos: pos.net.clone(),
        net_neg: neg.net.clone(),
        afc_net: pos.net.iter().zip(&neg.net).map(|(p, n)| p - n).collect(),
    })
}

impl AfcReport {
    /// `name,net_pos,net_neg,afc_net` rows followed by a `TOTAL` row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let map = |e| Error::csv("<output>", e);
        w.write_record(["name", "net_pos", "net_neg", "afc_net"]).map_err(map)?;
        for (j, name) in self.names.iter().enumerate() {
            w.write_record([
                name.clone(),
                self.net_pos[j].to_string(),
                self.net_neg[j].to_string(),
                self.afc_net[j].to_string(),
            ])
            .map_err(map)?;
        }
        w.write_record(["TOTAL".to_string(), String::new(), String::new(), self.afc_total.to_string()])
            .map_err(map)?;
        w.flush().map_err(|e| Error::io("<output>", e))
    }
}
