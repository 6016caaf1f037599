//! Predictive regressions of economic indicators on monthly connectedness:
//! OLS with Newey-West (Bartlett kernel) t-statistics for continuous targets
//! and probit with z-statistics for binary ones.
//!
//! For target `Ind`, horizon `h` and predictor set `x_t` the regression is
//!
//! ```text
//! Ind_{t+h} = β₀ + x_t β + Σ_{k=0}^{L−1} γ_k Ind_{t−k} + ε_{t+h}
//! ```
//!
//! with `x_t` one of `C_t`, `(C⁻_t, C⁺_t)` or `C⁻_t / C⁺_t`.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, spd_inverse};
use crate::market_data::{IndicatorKind, IndicatorSeries, Month};
use crate::rolling::MonthlyConnectedness;

pub const MIN_ALIGNED_MONTHS: usize = 24;
pub const PROBIT_MAX_ITER: usize = 100;
pub const PROBIT_GRADIENT_TOL: f64 = 1e-8;
/// Coefficient magnitude beyond which a still-improving fit is declared separated.
pub const SEPARATION_BETA: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedIndicator {
    pub name: String,
    pub kind: IndicatorKind,
    pub values: Vec<f64>,
}

/// Monthly connectedness joined with quarter-averaged indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignPanel {
    pub months: Vec<Month>,
    pub aggregate: Vec<f64>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub indicators: Vec<AlignedIndicator>,
    /// Months dropped for missing indicator values.
    pub dropped: usize,
}

impl DesignPanel {
    pub fn indicator(&self, name: &str) -> Option<&AlignedIndicator> {
        self.indicators.iter().find(|i| i.name == name)
    }
}

/// Mean of the three months ending at `month`; binary series become 1 when
/// the mean exceeds one half.
pub fn quarter_average(series: &IndicatorSeries, month: Month) -> Option<f64> {
    let mut sum = 0.0;
    for k in 0..3 {
        sum += series.get(month.offset(-k))?;
    }
    let mean = sum / 3.0;
    Some(match series.kind {
        IndicatorKind::Binary => f64::from(u8::from(mean > 0.5)),
        IndicatorKind::Continuous => mean,
    })
}

pub fn align_monthly(conn: &MonthlyConnectedness, indicators: &[IndicatorSeries]) -> Result<DesignPanel> {
    let mut panel = DesignPanel {
        months: Vec::new(),
        aggregate: Vec::new(),
        positive: Vec::new(),
        negative: Vec::new(),
        indicators: indicators
            .iter()
            .map(|s| AlignedIndicator { name: s.name.clone(), kind: s.kind, values: Vec::new() })
            .collect(),
        dropped: 0,
    };
    for (i, &month) in conn.months.iter().enumerate() {
        let row: Option<Vec<f64>> = indicators.iter().map(|s| quarter_average(s, month)).collect();
        let Some(row) = row else {
            panel.dropped += 1;
            continue;
        };
        panel.months.push(month);
        panel.aggregate.push(conn.aggregate[i]);
        panel.positive.push(conn.positive[i]);
        panel.negative.push(conn.negative[i]);
        for (ind, v) in panel.indicators.iter_mut().zip(row) {
            ind.values.push(v);
        }
    }
    if panel.months.len() < MIN_ALIGNED_MONTHS {
        return Err(Error::InsufficientSample { have: panel.months.len(), need: MIN_ALIGNED_MONTHS });
    }
    Ok(panel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    T,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    /// t-statistics (OLS) or z-statistics (probit).
    pub stats: Vec<f64>,
    pub stat_kind: StatKind,
    pub covariance: DMatrix<f64>,
    /// OLS only.
    pub r2: Option<f64>,
    /// Probit only.
    pub log_likelihood: Option<f64>,
    pub n_obs: usize,
    /// Zero residual variance; statistics are NaN.
    pub degenerate: bool,
    pub iterations: usize,
    /// Probit log-likelihood at each Newton iterate.
    pub trace: Vec<f64>,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<(f64, f64)> {
        let i = self.names.iter().position(|n| n == name)?;
        Some((self.coefficients[i], self.stats[i]))
    }
}

fn generic_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("x{i}")).collect()
}

fn check_shape(y: &DVector<f64>, x: &DMatrix<f64>) -> Result<()> {
    if y.len() != x.nrows() {
        return Err(Error::InvalidArgument(format!("{} observations but {} design rows", y.len(), x.nrows())));
    }
    if x.nrows() <= x.ncols() {
        return Err(Error::InsufficientSample { have: x.nrows(), need: x.ncols() + 1 });
    }
    Ok(())
}

/// Bartlett-kernel long-run cross-moment of the rows of `u` (`n × k`):
/// `Γ₀ + Σ_{l=1}^{L} (1 − l/(L+1)) (Γ_l + Γ_lᵀ)`, with `Γ_l = Σ_t u_t u_{t−l}ᵀ`.
pub fn bartlett_long_run(u: &DMatrix<f64>, lags: usize) -> DMatrix<f64> {
    let n = u.nrows();
    let mut s = u.transpose() * u;
    for l in 1..=lags.min(n.saturating_sub(1)) {
        let w = 1.0 - l as f64 / (lags as f64 + 1.0);
        let gamma = u.rows(l, n - l).transpose() * u.rows(0, n - l);
        s += (&gamma + gamma.transpose()) * w;
    }
    s
}

/// Least squares with a Newey-West sandwich covariance; `hac_lags = 0`
/// gives the White covariance. No small-sample scaling is applied.
pub fn ols_hac(y: &DVector<f64>, x: &DMatrix<f64>, hac_lags: usize) -> Result<RegressionResult> {
    check_shape(y, x)?;
    let (n, k) = x.shape();
    let beta = least_squares(x, &DMatrix::from_column_slice(n, 1, y.as_slice()))?.column(0).into_owned();
    let resid = y - x * &beta;
    let ssr = resid.norm_squared();
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let degenerate = ssr <= 1e-20 * y.norm_squared().max(f64::MIN_POSITIVE);

    let bread = spd_inverse(&(x.transpose() * x))?;
    let mut u = x.clone();
    for (mut row, e) in u.row_iter_mut().zip(resid.iter()) {
        row *= *e;
    }
    let meat = bartlett_long_run(&u, hac_lags);
    let cov = &bread * meat * &bread;
    let cov = (&cov + cov.transpose()) * 0.5;
    let stats = if degenerate {
        vec![f64::NAN; k]
    } else {
        beta.iter().enumerate().map(|(i, b)| b / cov[(i, i)].sqrt()).collect()
    };
    Ok(RegressionResult {
        names: generic_names(k),
        coefficients: beta.iter().copied().collect(),
        stats,
        stat_kind: StatKind::T,
        covariance: cov,
        r2: Some(if sst > 0.0 { 1.0 - ssr / sst } else { f64::NAN }),
        log_likelihood: None,
        n_obs: n,
        degenerate,
        iterations: 0,
        trace: Vec::new(),
    })
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const ASYMPTOTIC_BELOW: f64 = -30.0;

fn log_norm_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// `φ(x)/Φ(x)` for `x ≤ −30` via the asymptotic tail expansion of Mills' ratio.
fn tail_mills(x: f64) -> f64 {
    let z = 1.0 / (x * x);
    -x / (1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z))))
}

/// `ln Φ(x)`, accurate far into the lower tail.
pub fn log_norm_cdf(x: f64) -> f64 {
    if x > ASYMPTOTIC_BELOW {
        (0.5 * erfc(-x / std::f64::consts::SQRT_2)).ln()
    } else {
        log_norm_pdf(x) - tail_mills(x).ln()
    }
}

/// `φ(x)/Φ(x)`.
pub fn inverse_mills(x: f64) -> f64 {
    if x > ASYMPTOTIC_BELOW {
        (log_norm_pdf(x) - log_norm_cdf(x)).exp()
    } else {
        tail_mills(x)
    }
}

struct ProbitEval {
    ll: f64,
    grad: DVector<f64>,
    /// Observed information (negative Hessian).
    info: DMatrix<f64>,
}

fn probit_loglik(y: &DVector<f64>, x: &DMatrix<f64>, beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    eta.iter().zip(y.iter()).map(|(e, yi)| log_norm_cdf(if *yi > 0.5 { *e } else { -e })).sum()
}

fn probit_eval(y: &DVector<f64>, x: &DMatrix<f64>, beta: &DVector<f64>) -> ProbitEval {
    let (n, k) = x.shape();
    let eta = x * beta;
    let mut ll = 0.0;
    let mut grad = DVector::zeros(k);
    let mut weighted = x.clone();
    for i in 0..n {
        let q = if y[i] > 0.5 { 1.0 } else { -1.0 };
        let e = eta[i];
        ll += log_norm_cdf(q * e);
        let lambda = q * inverse_mills(q * e);
        let w = lambda * (lambda + e);
        grad.axpy(lambda, &x.row(i).transpose(), 1.0);
        weighted.row_mut(i).scale_mut(w);
    }
    let info = x.transpose() * weighted;
    ProbitEval { ll, grad, info: (&info + info.transpose()) * 0.5 }
}

/// Probit maximum likelihood by damped Newton iterations.
pub fn probit_fit(y: &DVector<f64>, x: &DMatrix<f64>) -> Result<RegressionResult> {
    check_shape(y, x)?;
    if y.iter().any(|v| *v != 0.0 && *v != 1.0) {
        return Err(Error::InvalidArgument("probit response must be 0 or 1".into()));
    }
    let ones = y.sum();
    if ones == 0.0 || ones == y.len() as f64 {
        return Err(Error::InvalidArgument("probit response needs both outcomes".into()));
    }
    let (n, k) = x.shape();
    spd_inverse(&(x.transpose() * x))?;

    let mut beta = DVector::zeros(k);
    let mut trace = Vec::new();
    for iter in 0..PROBIT_MAX_ITER {
        let ev = probit_eval(y, x, &beta);
        trace.push(ev.ll);
        let max_abs_beta = beta.amax();
        if ev.grad.amax() < PROBIT_GRADIENT_TOL {
            // a vanishing gradient at a near-zero likelihood is a perfect fit, not an optimum
            if ev.ll > -1e-6 {
                return Err(Error::Separation { max_abs_beta });
            }
            let cov = spd_inverse(&ev.info)?;
            let stats = beta.iter().enumerate().map(|(i, b)| b / cov[(i, i)].sqrt()).collect();
            return Ok(RegressionResult {
                names: generic_names(k),
                coefficients: beta.iter().copied().collect(),
                stats,
                stat_kind: StatKind::Z,
                covariance: cov,
                r2: None,
                log_likelihood: Some(ev.ll),
                n_obs: n,
                degenerate: false,
                iterations: iter,
                trace,
            });
        }
        let Some(chol) = ev.info.clone().cholesky() else {
            if max_abs_beta > 5.0 || ev.ll > -1e-6 {
                return Err(Error::Separation { max_abs_beta });
            }
            return Err(Error::Collinear);
        };
        let step = chol.solve(&ev.grad);
        // near the optimum the predicted gain drops below the rounding level of
        // the likelihood itself, where comparisons can no longer reject a step
        let below_noise = ev.grad.dot(&step) < 1e-13 * (1.0 + ev.ll.abs());
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand = &beta + &step * t;
            let ll = probit_loglik(y, x, &cand);
            if ll >= ev.ll || (below_noise && t == 1.0) {
                accepted = Some((cand, ll));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, ll)) = accepted else {
            return Err(Error::NonConvergence { trace });
        };
        if cand.amax() > SEPARATION_BETA && ll > ev.ll {
            return Err(Error::Separation { max_abs_beta: cand.amax() });
        }
        beta = cand;
    }
    Err(Error::NonConvergence { trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictors {
    /// `β C_t`
    TotalC,
    /// `β⁻ C⁻_t + β⁺ C⁺_t`
    PosAndNegC,
    /// `β C⁻_t / C⁺_t`
    RatioC,
}

impl Predictors {
    pub const ALL: [Predictors; 3] = [Predictors::TotalC, Predictors::PosAndNegC, Predictors::RatioC];

    pub fn label(self) -> &'static str {
        match self {
            Predictors::TotalC => "total_c",
            Predictors::PosAndNegC => "pos_and_neg_c",
            Predictors::RatioC => "ratio_c",
        }
    }

    /// Names of the connectedness coefficients.
    pub fn coefficient_names(self) -> &'static [&'static str] {
        match self {
            Predictors::TotalC | Predictors::RatioC => &["beta"],
            Predictors::PosAndNegC => &["beta_neg", "beta_pos"],
        }
    }
}

impl fmt::Display for Predictors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    OlsHac,
    Probit,
}

impl Estimator {
    pub fn for_kind(kind: IndicatorKind) -> Self {
        match kind {
            IndicatorKind::Continuous => Estimator::OlsHac,
            IndicatorKind::Binary => Estimator::Probit,
        }
    }
}

/// Newey-West truncation lag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HacLags {
    /// Equal to the forecast horizon.
    #[default]
    Horizon,
    Fixed(usize),
}

impl HacLags {
    pub fn resolve(self, horizon: usize) -> usize {
        match self {
            HacLags::Horizon => horizon,
            HacLags::Fixed(l) => l,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSpec {
    pub target: String,
    pub horizon: usize,
    pub predictors: Predictors,
    pub endo_lags: usize,
    pub estimator: Estimator,
    pub hac_lags: HacLags,
}

impl RegressionSpec {
    /// Twelve own lags, estimator chosen by the target's kind.
    pub fn new(target: &AlignedIndicator, horizon: usize, predictors: Predictors, hac_lags: HacLags) -> Self {
        RegressionSpec {
            target: target.name.clone(),
            horizon,
            predictors,
            endo_lags: 12,
            estimator: Estimator::for_kind(target.kind),
            hac_lags,
        }
    }
}

/// Every target × horizon × predictor set, in that nesting order.
pub fn suite_specs(panel: &DesignPanel, targets: &[String], horizons: &[usize], hac_lags: HacLags) -> Result<Vec<RegressionSpec>> {
    let mut specs = Vec::new();
    for name in targets {
        let target = panel
            .indicator(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown target indicator {name}")))?;
        for &h in horizons {
            for pred in Predictors::ALL {
                specs.push(RegressionSpec::new(target, h, pred, hac_lags));
            }
        }
    }
    Ok(specs)
}

/// Builds `(y, X, names)` for a spec from the aligned panel.
pub fn design_matrix(spec: &RegressionSpec, panel: &DesignPanel) -> Result<(DVector<f64>, DMatrix<f64>, Vec<String>)> {
    let target = panel
        .indicator(&spec.target)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown target indicator {}", spec.target)))?;
    if spec.horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least one month".into()));
    }
    if Estimator::for_kind(target.kind) != spec.estimator {
        return Err(Error::InvalidArgument(format!("{} is {:?} but the regression asks for {:?}", target.name, target.kind, spec.estimator)));
    }
    let row_of: HashMap<Month, usize> = panel.months.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut names = vec!["beta0".to_string()];
    names.extend(spec.predictors.coefficient_names().iter().map(|s| s.to_string()));
    names.extend((0..spec.endo_lags).map(|k| format!("gamma{k}")));

    let mut ys = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    for (i, month) in panel.months.iter().enumerate() {
        let Some(&lead) = row_of.get(&month.offset(spec.horizon as i64)) else { continue };
        let lags: Option<Vec<f64>> = (0..spec.endo_lags)
            .map(|k| row_of.get(&month.offset(-(k as i64))).map(|&r| target.values[r]))
            .collect();
        let Some(lags) = lags else { continue };
        let predictors: Vec<f64> = match spec.predictors {
            Predictors::TotalC => vec![panel.aggregate[i]],
            Predictors::PosAndNegC => vec![panel.negative[i], panel.positive[i]],
            Predictors::RatioC => {
                if !(panel.positive[i] > 0.0) {
                    continue;
                }
                vec![panel.negative[i] / panel.positive[i]]
            }
        };
        ys.push(target.values[lead]);
        rows.push(1.0);
        rows.extend(predictors);
        rows.extend(lags);
    }
    let k = names.len();
    let n = ys.len();
    Ok((DVector::from_vec(ys), DMatrix::from_row_slice(n, k, &rows), names))
}

pub fn run_spec(spec: &RegressionSpec, panel: &DesignPanel) -> Result<RegressionResult> {
    let (y, x, names) = design_matrix(spec, panel)?;
    let mut result = match spec.estimator {
        Estimator::OlsHac => ols_hac(&y, &x, spec.hac_lags.resolve(spec.horizon))?,
        Estimator::Probit => probit_fit(&y, &x)?,
    };
    result.names = names;
    Ok(result)
}

#[derive(Debug)]
pub struct SuiteCell {
    pub spec: RegressionSpec,
    pub outcome: Result<RegressionResult>,
}

/// Fits every spec; failures are kept in their cell and do not stop the suite.
pub fn run_suite(specs: &[RegressionSpec], panel: &DesignPanel) -> Vec<SuiteCell> {
    specs
        .par_iter()
        .map(|spec| SuiteCell { spec: spec.clone(), outcome: run_spec(spec, panel) })
        .collect()
}

fn fit_stat(r: &RegressionResult) -> f64 {
    r.r2.or(r.log_likelihood).unwrap_or(f64::NAN)
}

/// One row per horizon and, per target, the connectedness coefficients with
/// their statistics and the fit statistic (R² for OLS, log-likelihood for
/// probit). Cells that failed are written as `NA`.
pub fn write_suite_table<W: Write>(writer: W, cells: &[SuiteCell], predictors: Predictors) -> Result<()> {
    let cells: Vec<&SuiteCell> = cells.iter().filter(|c| c.spec.predictors == predictors).collect();
    let mut targets: Vec<&str> = Vec::new();
    let mut horizons: Vec<usize> = Vec::new();
    for c in &cells {
        if !targets.contains(&c.spec.target.as_str()) {
            targets.push(&c.spec.target);
        }
        if !horizons.contains(&c.spec.horizon) {
            horizons.push(c.spec.horizon);
        }
    }
    horizons.sort_unstable();
    let coef_names = predictors.coefficient_names();

    let mut w = csv::Writer::from_writer(writer);
    let map = |e| Error::csv("<output>", e);
    let mut header = vec!["horizon".to_string()];
    for t in &targets {
        for c in coef_names {
            header.push(format!("{t}_{c}"));
            header.push(format!("{t}_{c}_stat"));
        }
        header.push(format!("{t}_fit"));
    }
    w.write_record(&header).map_err(map)?;
    for h in horizons {
        let mut row = vec![h.to_string()];
        for t in &targets {
            let cell = cells.iter().find(|c| c.spec.target == *t && c.spec.horizon == h);
            match cell.map(|c| &c.outcome) {
                Some(Ok(r)) => {
                    for c in coef_names {
                        let (b, s) = r.coefficient(c).unwrap_or((f64::NAN, f64::NAN));
                        row.push(b.to_string());
                        row.push(s.to_string());
                    }
                    row.push(fit_stat(r).to_string());
                }
                _ => row.extend(std::iter::repeat_n("NA".to_string(), 2 * coef_names.len() + 1)),
            }
        }
        w.write_record(&row).map_err(map)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

/// Every coefficient of every cell:
/// `target,horizon,predictors,estimator,n_obs,coefficient,estimate,stat,fit,status`.
pub fn write_suite_long<W: Write>(writer: W, cells: &[SuiteCell]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let map = |e| Error::csv("<output>", e);
    w.write_record(["target", "horizon", "predictors", "estimator", "n_obs", "coefficient", "estimate", "stat", "fit", "status"])
        .map_err(map)?;
    for c in cells {
        let s = &c.spec;
        let estimator = match s.estimator {
            Estimator::OlsHac => "ols_hac",
            Estimator::Probit => "probit",
        };
        let lead = [s.target.clone(), s.horizon.to_string(), s.predictors.label().to_string(), estimator.to_string()];
        match &c.outcome {
            Ok(r) => {
                let status = if r.degenerate { "degenerate" } else { "ok" };
                for i in 0..r.names.len() {
                    let mut row = lead.to_vec();
                    row.extend([
                        r.n_obs.to_string(),
                        r.names[i].clone(),
                        r.coefficients[i].to_string(),
                        r.stats[i].to_string(),
                        fit_stat(r).to_string(),
                        status.to_string(),
                    ]);
                    w.write_record(&row).map_err(map)?;
                }
            }
            Err(e) => {
                let mut row = lead.to_vec();
                row.extend([String::new(), String::new(), String::new(), String::new(), String::new(), format!("error:{}", e.kind())]);
                w.write_record(&row).map_err(map)?;
            }
        }
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn series(name: &str, vals: &[f64]) -> IndicatorSeries {
        let obs = vals.iter().enumerate().map(|(i, v)| (Month::new(2000, 1).offset(i as i64), Some(*v))).collect();
        IndicatorSeries::new(name, obs).unwrap()
    }

    #[test]
    fn quarter_average_rules() {
        let nber = series("NBER", &[1.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(quarter_average(&nber, Month::new(2000, 3)), Some(1.0));
        assert_eq!(quarter_average(&nber, Month::new(2000, 6)), Some(0.0));
        let cont = series("X", &[2.0, 4.0, 6.0]);
        assert_eq!(quarter_average(&cont, Month::new(2000, 3)), Some(4.0));
        assert_eq!(quarter_average(&cont, Month::new(2000, 2)), None);
    }

    #[test]
    fn align_requires_two_years() {
        let months: Vec<Month> = (0..30).map(|i| Month::new(2000, 1).offset(i)).collect();
        let conn = MonthlyConnectedness {
            months: months.clone(),
            aggregate: vec![50.0; 30],
            positive: vec![30.0; 30],
            negative: vec![20.0; 30],
            skipped: vec![],
        };
        let ind = series("X", &(0..30).map(f64::from).collect::<Vec<_>>());
        let p = align_monthly(&conn, std::slice::from_ref(&ind)).unwrap();
        assert_eq!(p.months.len(), 28);
        assert_eq!(p.dropped, 2);
        assert_eq!(p.indicators[0].values[0], 1.0);
        let short = MonthlyConnectedness {
            months: months[..25].to_vec(),
            aggregate: vec![50.0; 25],
            positive: vec![30.0; 25],
            negative: vec![20.0; 25],
            skipped: vec![],
        };
        assert!(matches!(align_monthly(&short, &[ind]), Err(Error::InsufficientSample { have: 23, need: 24 })));
    }

    #[test]
    fn hac_zero_lags_is_white() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 300;
        let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.sample::<f64, _>(StandardNormal) });
        let y = DVector::from_fn(n, |i, _| 1.0 + 0.5 * x[(i, 1)] + (1.0 + x[(i, 1)].abs()) * rng.sample::<f64, _>(StandardNormal));
        let r = ols_hac(&y, &x, 0).unwrap();
        let b = DVector::from_vec(r.coefficients.clone());
        let e = &y - &x * &b;
        let bread = (x.transpose() * &x).try_inverse().unwrap();
        let mut meat = DMatrix::zeros(2, 2);
        for i in 0..n {
            let xi = x.row(i).transpose();
            meat += &xi * xi.transpose() * e[i] * e[i];
        }
        let white = &bread * meat * &bread;
        assert!((&r.covariance - white).amax() < 1e-14);
        assert!((x.transpose() * e).amax() / n as f64 <= 1e-8);
    }

    #[test]
    fn exact_fit_is_degenerate() {
        let x = DMatrix::from_fn(20, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let y = DVector::from_fn(20, |i, _| 2.0 * i as f64);
        let r = ols_hac(&y, &x, 2).unwrap();
        assert!(r.degenerate);
        assert!((r.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(r.stats.iter().all(|s| s.is_nan()));
    }

    #[test]
    fn collinear_design_rejected() {
        let x = DMatrix::from_fn(20, 3, |i, j| if j == 2 { 2.0 * i as f64 } else if j == 1 { i as f64 } else { 1.0 });
        let y = DVector::from_fn(20, |i, _| (i as f64).sin());
        assert!(matches!(ols_hac(&y, &x, 1), Err(Error::Collinear)));
    }

    #[test]
    fn tail_functions_are_continuous() {
        for x in [-5.0, -1.0, 0.0, 2.0] {
            let phi = Normal::standard().cdf(x);
            assert!((log_norm_cdf(x) - phi.ln()).abs() < 1e-12);
        }
        let below = log_norm_cdf(ASYMPTOTIC_BELOW - 1e-9);
        let above = log_norm_cdf(ASYMPTOTIC_BELOW + 1e-9);
        assert!((below - above).abs() / above.abs() < 1e-9);
        let below = inverse_mills(ASYMPTOTIC_BELOW - 1e-9);
        let above = inverse_mills(ASYMPTOTIC_BELOW + 1e-9);
        assert!((below - above).abs() / above < 1e-9);
        assert!(log_norm_cdf(-200.0).is_finite());
        assert!((inverse_mills(-200.0) - 200.0).abs() < 0.01);
    }

    #[test]
    fn intercept_only_probit() {
        let y = DVector::from_fn(400, |i, _| f64::from(u8::from(i % 4 == 0)));
        let x = DMatrix::from_element(400, 1, 1.0);
        let r = probit_fit(&y, &x).unwrap();
        let expected = Normal::standard().inverse_cdf(0.25);
        assert!((r.coefficients[0] - expected).abs() < 1e-6);
        assert!((expected + 0.6745).abs() < 1e-4);
    }

    #[test]
    fn separable_probit_rejected() {
        let x = DMatrix::from_fn(40, 2, |i, j| if j == 0 { 1.0 } else { i as f64 - 19.5 });
        let y = DVector::from_fn(40, |i, _| f64::from(u8::from(i >= 20)));
        assert!(matches!(probit_fit(&y, &x), Err(Error::Separation { .. })));
    }

    #[test]
    fn probit_likelihood_never_decreases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 2000;
        let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.sample::<f64, _>(StandardNormal) });
        let y = DVector::from_fn(n, |i, _| {
            let latent = -0.5 + 1.5 * x[(i, 1)] + rng.sample::<f64, _>(StandardNormal);
            f64::from(u8::from(latent > 0.0))
        });
        let r = probit_fit(&y, &x).unwrap();
        assert!(r.iterations > 0 && r.iterations < 20);
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs()));
        assert!((r.coefficients[1] - 1.5).abs() < 0.2);
    }
}
