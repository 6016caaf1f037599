//! Seeded synthetic data: Black–Scholes option chains, simulated VAR paths
//! and a complete multi-name fixture for exercising the pipeline end to end.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::market_data::{IndicatorKind, IndicatorSeries, MarketCapTable, Month, OptionChainDay, OptionQuote, RateCurveDay, Right};
use crate::predictive::{AlignedIndicator, DesignPanel};

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// European Black–Scholes price on a non-dividend-paying spot.
pub fn black_scholes(spot: f64, strike: f64, rate: f64, vol: f64, t: f64, right: Right) -> f64 {
    let sd = vol * t.sqrt();
    let d1 = ((spot / strike).ln() + (rate + 0.5 * vol * vol) * t) / sd;
    let d2 = d1 - sd;
    let disc = strike * (-rate * t).exp();
    match right {
        Right::Call => spot * norm_cdf(d1) - disc * norm_cdf(d2),
        Right::Put => disc * norm_cdf(-d2) - spot * norm_cdf(-d1),
    }
}

/// Volatility smile `atm · (1 − skew · ln(K/F))`, floored at 1%.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smile {
    pub atm: f64,
    pub skew: f64,
}

impl Smile {
    pub fn vol(&self, strike: f64, forward: f64) -> f64 {
        (self.atm * (1.0 - self.skew * (strike / forward).ln())).max(0.01)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticChainSpec {
    pub smile: Smile,
    pub rate: f64,
    pub expiry_days: Vec<i64>,
    pub strike_min: f64,
    pub strike_max: f64,
    pub strike_step: f64,
    /// Relative half-spread around the model price.
    pub half_spread: f64,
    /// Quotes priced below this are not listed.
    pub min_price: f64,
}

impl SyntheticChainSpec {
    pub fn flat(vol: f64, rate: f64, expiry_days: Vec<i64>, strike_min: f64, strike_max: f64, strike_step: f64) -> Self {
        SyntheticChainSpec {
            smile: Smile { atm: vol, skew: 0.0 },
            rate,
            expiry_days,
            strike_min,
            strike_max,
            strike_step,
            half_spread: 0.01,
            min_price: 1e-12,
        }
    }

    pub fn strikes(&self) -> Vec<f64> {
        let n = ((self.strike_max - self.strike_min) / self.strike_step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.strike_min + i as f64 * self.strike_step).collect()
    }
}

/// A chain of Black–Scholes quotes whose midquotes equal the model prices.
pub fn flat_chain(underlier: &str, date: NaiveDate, spot: f64, spec: &SyntheticChainSpec) -> OptionChainDay {
    let mut quotes = Vec::new();
    for &days in &spec.expiry_days {
        let t = days as f64 / 365.0;
        let forward = spot * (spec.rate * t).exp();
        let expiry = date + Duration::days(days);
        for k in spec.strikes() {
            let vol = spec.smile.vol(k, forward);
            for right in [Right::Call, Right::Put] {
                let price = black_scholes(spot, k, spec.rate, vol, t, right);
                if price < spec.min_price {
                    continue;
                }
                quotes.push(OptionQuote {
                    strike: k,
                    right,
                    bid: price * (1.0 - spec.half_spread),
                    ask: price * (1.0 + spec.half_spread),
                    expiry,
                    quote_date: date,
                });
            }
        }
    }
    OptionChainDay::from_quotes(underlier, date, quotes)
}

/// Simulates `y_t = c + Σ Φ_k y_{t−k} + ε_t`, `ε ~ N(0, Σ)`, returning a
/// `n × N` matrix after discarding `burn_in` steps started from zero.
pub fn simulate_var(
    phi: &[DMatrix<f64>],
    intercept: &DVector<f64>,
    sigma: &DMatrix<f64>,
    n: usize,
    burn_in: usize,
    seed: u64,
) -> Result<DMatrix<f64>> {
    let dim = intercept.len();
    let chol = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("shock covariance is not positive definite".into()))?;
    let l = chol.l();
    let p = phi.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = n + burn_in;
    let mut path: Vec<DVector<f64>> = Vec::with_capacity(total);
    for t in 0..total {
        let z = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut y = intercept + &l * z;
        for k in 1..=p.min(t) {
            y += &phi[k - 1] * &path[t - k];
        }
        path.push(y);
    }
    Ok(DMatrix::from_fn(n, dim, |i, j| path[burn_in + i][j]))
}

/// Weekdays starting at `start`.
pub fn trading_days(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut d = start;
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}

fn third_friday(month: Month) -> NaiveDate {
    let first = NaiveDate::from_ymd_opt(month.year, month.month, 1).expect("valid month");
    let offset = (Weekday::Fri.num_days_from_monday() + 7 - first.weekday().num_days_from_monday()) % 7;
    first + Duration::days(offset as i64 + 14)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSpec {
    pub names: Vec<String>,
    pub start: NaiveDate,
    pub n_days: usize,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            names: vec!["AAA".into(), "BBB".into(), "CCC".into()],
            start: NaiveDate::from_ymd_opt(2007, 1, 2).unwrap(),
            n_days: 1100,
            seed: 7,
        }
    }
}

/// A complete synthetic input set.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub chains: Vec<OptionChainDay>,
    pub rates: Vec<RateCurveDay>,
    pub caps: MarketCapTable,
    pub indicators: Vec<IndicatorSeries>,
}

/// Generates chains whose ATM volatility and skew follow a correlated
/// log-VAR(1) across names, with monthly third-Friday expiries.
pub fn generate_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    let n = spec.names.len();
    if n == 0 || spec.n_days < 2 {
        return Err(Error::InvalidArgument("fixture needs at least one name and two days".into()));
    }
    let days = trading_days(spec.start, spec.n_days);

    // state per name: log ATM vol and skew, driven jointly
    let dim = 2 * n;
    let mut phi = DMatrix::zeros(dim, dim);
    for j in 0..n {
        phi[(j, j)] = 0.95;
        phi[(n + j, n + j)] = 0.9;
        phi[(j, (j + 1) % n)] += if n > 1 { 0.03 } else { 0.0 };
        phi[(n + j, j)] = 0.05;
    }
    let mut sigma = DMatrix::from_element(dim, dim, 0.0);
    for a in 0..dim {
        for b in 0..dim {
            let same_block = (a < n) == (b < n);
            sigma[(a, b)] = match (a == b, same_block) {
                (true, true) if a < n => 0.004,
                (true, _) => 0.01,
                (false, true) if a < n => 0.002,
                (false, true) => 0.003,
                _ => 0.0,
            };
        }
    }
    let state = simulate_var(&[phi], &DVector::zeros(dim), &sigma, days.len(), 200, spec.seed)?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(1));
    let mut spots: Vec<f64> = (0..n).map(|j| 40.0 + 20.0 * j as f64).collect();
    let mut chains = Vec::with_capacity(days.len() * n);
    let mut rates = Vec::with_capacity(days.len());
    for (i, &date) in days.iter().enumerate() {
        let r = 0.02 + 0.005 * (i as f64 / 250.0).sin();
        rates.push(RateCurveDay::new(date, vec![(7, r - 0.001), (30, r), (90, r + 0.002)])?);
        let m = Month::of(date);
        let mut expiries: Vec<NaiveDate> = (0..4).map(|k| third_friday(m.offset(k))).filter(|e| *e > date).collect();
        expiries.truncate(3);
        let expiry_days: Vec<i64> = expiries.iter().map(|e| (*e - date).num_days()).collect();
        for j in 0..n {
            let atm = 0.3 * state[(i, j)].exp();
            let skew = (0.6 + state[(i, n + j)]).clamp(0.05, 1.5);
            let spot = spots[j];
            let step = ((spot * 0.015 * 4.0).round() / 4.0).max(0.25);
            let lo = ((spot * 0.75) / step).floor() * step;
            let hi = ((spot * 1.35) / step).ceil() * step;
            let chain_spec = SyntheticChainSpec {
                smile: Smile { atm, skew },
                rate: r,
                expiry_days: expiry_days.clone(),
                strike_min: lo.max(step),
                strike_max: hi,
                strike_step: step,
                half_spread: 0.02,
                min_price: 0.005,
            };
            chains.push(flat_chain(&spec.names[j], date, spot, &chain_spec));
            let z: f64 = rng.sample(StandardNormal);
            spots[j] *= (atm / 250f64.sqrt() * z - 0.5 * atm * atm / 250.0).exp();
        }
    }
    chains.sort_by(|a, b| a.underlier.cmp(&b.underlier).then(a.quote_date.cmp(&b.quote_date)));

    let caps = MarketCapTable::new(spec.names.iter().enumerate().map(|(j, name)| (name.clone(), 50.0 + 25.0 * j as f64)))?;

    let first = Month::of(days[0]);
    let last = Month::of(*days.last().unwrap());
    let months: Vec<Month> = (first.index()..=last.index()).map(Month::from_index).collect();
    let mut ads = Vec::with_capacity(months.len());
    let mut epu = Vec::with_capacity(months.len());
    let (mut a, mut e) = (0.0f64, 100.0f64);
    for _ in &months {
        a = 0.7 * a + 0.5 * rng.sample::<f64, _>(StandardNormal);
        e = 100.0 + 0.8 * (e - 100.0) + 15.0 * rng.sample::<f64, _>(StandardNormal);
        ads.push(a);
        epu.push(e);
    }
    let recession = |m: Month| {
        let (s, t) = (Month::new(2007, 12), Month::new(2009, 6));
        if first <= t && last >= s {
            m >= s && m <= t
        } else {
            let mid = (first.index() + last.index()) / 2;
            (m.index() - mid).abs() <= 6
        }
    };
    let indicators = vec![
        IndicatorSeries::new("ADS", months.iter().zip(&ads).map(|(m, v)| (*m, Some(*v))).collect())?,
        IndicatorSeries::new("NBER", months.iter().map(|m| (*m, Some(if recession(*m) { 1.0 } else { 0.0 }))).collect())?,
        IndicatorSeries::new("EPU", months.iter().zip(&epu).map(|(m, v)| (*m, Some(*v))).collect())?,
    ];
    Ok(Fixture { chains, rates, caps, indicators })
}

/// Monthly panel with independent AR(1) call- and put-side connectedness and
/// a continuous target `Y_t = 1 + β⁻ C⁻_{t−h} + ε_t`, `ε` iid standard
/// normal, named `TARGET`.
pub fn planted_signal_panel(n_months: usize, horizon: usize, beta_neg: f64, seed: u64) -> Result<DesignPanel> {
    if n_months <= horizon {
        return Err(Error::InvalidArgument("panel shorter than the planted horizon".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ar = |mean: f64, sd: f64| {
        let mut x = mean;
        let mut out = Vec::with_capacity(n_months + 50);
        for _ in 0..n_months + 50 {
            x = mean + 0.6 * (x - mean) + sd * rng.sample::<f64, _>(StandardNormal);
            out.push(x);
        }
        out.split_off(50)
    };
    let negative = ar(30.0, 4.0);
    let positive = ar(35.0, 4.0);
    let aggregate: Vec<f64> = negative.iter().zip(&positive).map(|(n, p)| 0.5 * (n + p) + 10.0).collect();
    let noise: Vec<f64> = (0..n_months).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let values = (0..n_months)
        .map(|t| 1.0 + noise[t] + if t >= horizon { beta_neg * negative[t - horizon] } else { beta_neg * 30.0 })
        .collect();
    Ok(DesignPanel {
        months: (0..n_months).map(|i| Month::new(1990, 1).offset(i as i64)).collect(),
        aggregate,
        positive,
        negative,
        indicators: vec![AlignedIndicator { name: "TARGET".into(), kind: IndicatorKind::Continuous, values }],
        dropped: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn black_scholes_reference_values() {
        // textbook: S=K=100, r=5%, σ=20%, T=1
        let c = black_scholes(100.0, 100.0, 0.05, 0.2, 1.0, Right::Call);
        let p = black_scholes(100.0, 100.0, 0.05, 0.2, 1.0, Right::Put);
        assert!((c - 10.450_583_572_185_565).abs() < 1e-9, "{c}");
        assert!((p - 5.573_526_022_256_971).abs() < 1e-9, "{p}");
        // parity
        assert!((c - p - (100.0 - 100.0 * (-0.05f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn third_fridays() {
        assert_eq!(third_friday(Month::new(2008, 9)), NaiveDate::from_ymd_opt(2008, 9, 19).unwrap());
        assert_eq!(third_friday(Month::new(2020, 1)), NaiveDate::from_ymd_opt(2020, 1, 17).unwrap());
    }

    #[test]
    fn var_simulation_is_seeded() {
        let phi = vec![DMatrix::from_row_slice(1, 1, &[0.5])];
        let a = simulate_var(&phi, &DVector::zeros(1), &DMatrix::identity(1, 1), 50, 10, 3).unwrap();
        let b = simulate_var(&phi, &DVector::zeros(1), &DMatrix::identity(1, 1), 50, 10, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fixture_shapes() {
        let spec = FixtureSpec { n_days: 30, ..FixtureSpec::default() };
        let fx = generate_fixture(&spec).unwrap();
        assert_eq!(fx.chains.len(), 90);
        assert_eq!(fx.rates.len(), 30);
        assert_eq!(fx.indicators.len(), 3);
        assert!(fx.chains.iter().all(|c| c.slices.len() >= 2));
    }
}
