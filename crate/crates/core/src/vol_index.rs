//! Model-free implied volatility indexes from out-of-the-money option strips.
//!
//! For each expiry the risk-neutral variance is
//!
//! ```text
//! σ² = (2 e^{rT} / T) Σᵢ (ΔKᵢ / Kᵢ²) Q(Kᵢ) − (1/T) (F/K₀ − 1)²
//! ```
//!
//! and the 30-day index interpolates linearly in total variance between the
//! two selected expiries:
//!
//! ```text
//! index = 100 √( (365/30) [ T₁σ₁² (N₂−30)/(N₂−N₁) + T₂σ₂² (30−N₁)/(N₂−N₁) ] )
//! ```
//!
//! The positive (call-side) index sums only calls at `K ≥ K₀`, the negative
//! (put-side) index only puts at `K ≤ K₀`. `K₀` belongs to both one-sided
//! strips, so `VIX⁺² + VIX⁻²` exceeds `VIX²` by exactly the `K₀` term
//! reported by [`k0_excess`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::{csv_reader, parse_date, ExpiryQuotes, MarketCapTable, OptionChainDay, RateBook, RateCurveDay, Right};

pub const TARGET_DAYS: i64 = 30;
pub const DAYS_PER_YEAR: f64 = 365.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Aggregate,
    Positive,
    Negative,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Aggregate, Flavor::Positive, Flavor::Negative];

    pub fn side(self) -> Side {
        match self {
            Flavor::Aggregate => Side::All,
            Flavor::Positive => Side::CallsOnly,
            Flavor::Negative => Side::PutsOnly,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Flavor::Aggregate => "aggregate",
            Flavor::Positive => "positive",
            Flavor::Negative => "negative",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    All,
    CallsOnly,
    PutsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadingGapPolicy {
    /// Drop leading dates until every name has a value.
    Trim,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VolIndexConfig {
    /// Expiries closer than this are ignored.
    pub min_days_to_expiry: i64,
    pub leading_gap: LeadingGapPolicy,
}

impl Default for VolIndexConfig {
    fn default() -> Self {
        VolIndexConfig { min_days_to_expiry: 7, leading_gap: LeadingGapPolicy::Trim }
    }
}

/// Midquotes available at one strike.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrikeQuotes {
    pub strike: f64,
    pub call: Option<f64>,
    pub put: Option<f64>,
}

/// Merges a slice's calls and puts into per-strike midquotes, ascending in strike.
pub fn strike_quotes(slice: &ExpiryQuotes) -> Vec<StrikeQuotes> {
    let mut by_strike: BTreeMap<u64, StrikeQuotes> = BTreeMap::new();
    for q in &slice.quotes {
        // positive finite f64 bit patterns sort like the values
        let e = by_strike.entry(q.strike.to_bits()).or_insert(StrikeQuotes { strike: q.strike, call: None, put: None });
        match q.right {
            Right::Call => e.call = Some(q.mid()),
            Right::Put => e.put = Some(q.mid()),
        }
    }
    by_strike.into_values().collect()
}

fn usable(slice: &ExpiryQuotes) -> bool {
    let sq = strike_quotes(slice);
    sq.len() >= 2 && sq.iter().any(|s| s.call.is_some() && s.put.is_some())
}

/// Picks the near and next expiries around the 30-day target.
///
/// Near is the latest usable expiry at or inside 30 days and next the
/// earliest beyond it. With nothing inside 30 days the two earliest are used;
/// with nothing beyond, the two latest.
pub fn select_expiries(chain: &OptionChainDay, cfg: &VolIndexConfig) -> Result<(NaiveDate, NaiveDate)> {
    let mut days: Vec<(i64, NaiveDate)> = chain
        .slices
        .iter()
        .filter(|s| s.days_to_expiry(chain.quote_date) >= cfg.min_days_to_expiry.max(1) && usable(s))
        .map(|s| (s.days_to_expiry(chain.quote_date), s.expiry))
        .collect();
    days.sort();
    if days.len() < 2 {
        return Err(Error::InsufficientChain {
            underlier: chain.underlier.clone(),
            date: chain.quote_date,
            reason: format!("{} usable expiries", days.len()),
        });
    }
    let split = days.partition_point(|d| d.0 <= TARGET_DAYS);
    let (near, next) = if split == 0 {
        (days[0], days[1])
    } else if split == days.len() {
        (days[split - 2], days[split - 1])
    } else {
        (days[split - 1], days[split])
    };
    Ok((near.1, next.1))
}

/// Forward level by put-call parity at the strike with the smallest
/// `|c − p|`, and `K₀` as the largest strike not above it.
pub fn compute_forward(quotes: &[StrikeQuotes], rate: f64, t: f64) -> Result<(f64, f64)> {
    let (k_star, diff) = quotes
        .iter()
        .filter_map(|s| Some((s.strike, s.call? - s.put?)))
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .ok_or(Error::Parity)?;
    let forward = (rate * t).exp() * diff + k_star;
    let k0 = quotes
        .iter()
        .map(|s| s.strike)
        .filter(|&k| k <= forward)
        .max_by(f64::total_cmp)
        .ok_or_else(|| Error::InvalidArgument(format!("forward {forward} below every strike")))?;
    Ok((forward, k0))
}

/// Strike gaps: half the distance between neighbours inside the strip,
/// the single adjacent difference at either end.
pub fn strike_gaps(strikes: &[f64]) -> Result<Vec<f64>> {
    let n = strikes.len();
    if n < 2 {
        return Err(Error::TooFewStrikes(n));
    }
    Ok((0..n)
        .map(|i| match i {
            0 => strikes[1] - strikes[0],
            i if i == n - 1 => strikes[n - 1] - strikes[n - 2],
            i => 0.5 * (strikes[i + 1] - strikes[i - 1]),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripPoint {
    pub strike: f64,
    pub call: Option<f64>,
    pub put: Option<f64>,
    pub gap: f64,
}

impl StripPoint {
    fn contribution(&self, k0: f64, side: Side) -> Option<f64> {
        let at_k0 = self.strike == k0;
        match side {
            Side::All if at_k0 => match (self.call, self.put) {
                (Some(c), Some(p)) => Some(0.5 * (c + p)),
                (c, p) => c.or(p),
            },
            Side::All if self.strike < k0 => self.put,
            Side::All => self.call,
            Side::CallsOnly if self.strike >= k0 => self.call,
            Side::PutsOnly if self.strike <= k0 => self.put,
            _ => None,
        }
    }
}

/// One expiry's out-of-the-money strip with its forward and discounting inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpirySlice {
    pub days: i64,
    /// Year fraction, `days / 365`.
    pub t: f64,
    pub rate: f64,
    pub forward: f64,
    pub k0: f64,
    pub strip: Vec<StripPoint>,
}

impl ExpirySlice {
    /// Builds the strip: puts below `K₀`, calls above, whatever is quoted at `K₀`.
    /// Gaps are taken over the full strip so one-sided sums reuse them.
    pub fn from_quotes(slice: &ExpiryQuotes, quote_date: NaiveDate, rate: f64) -> Result<Self> {
        let days = slice.days_to_expiry(quote_date);
        if days <= 0 {
            return Err(Error::InvalidArgument(format!("expiry {} not after {quote_date}", slice.expiry)));
        }
        let t = days as f64 / DAYS_PER_YEAR;
        let quotes = strike_quotes(slice);
        let (forward, k0) = compute_forward(&quotes, rate, t)?;
        let kept: Vec<StrikeQuotes> = quotes
            .into_iter()
            .filter(|s| {
                if s.strike < k0 {
                    s.put.is_some()
                } else if s.strike > k0 {
                    s.call.is_some()
                } else {
                    s.call.is_some() || s.put.is_some()
                }
            })
            .map(|s| StrikeQuotes {
                strike: s.strike,
                call: if s.strike >= k0 { s.call } else { None },
                put: if s.strike <= k0 { s.put } else { None },
            })
            .collect();
        let strikes: Vec<f64> = kept.iter().map(|s| s.strike).collect();
        let gaps = strike_gaps(&strikes)?;
        let strip = kept
            .into_iter()
            .zip(gaps)
            .map(|(s, gap)| StripPoint { strike: s.strike, call: s.call, put: s.put, gap })
            .collect();
        Ok(ExpirySlice { days, t, rate, forward, k0, strip })
    }

    fn adjustment(&self) -> f64 {
        (self.forward / self.k0 - 1.0).powi(2) / self.t
    }

    fn scale(&self) -> f64 {
        2.0 * (self.rate * self.t).exp() / self.t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceResult {
    pub sigma2: f64,
    pub side: Side,
    pub n_strikes: usize,
}

/// Annualized variance from the side-filtered strip.
pub fn variance_strip(slice: &ExpirySlice, side: Side) -> Result<VarianceResult> {
    let (sum, n) = slice
        .strip
        .iter()
        .filter_map(|p| p.contribution(slice.k0, side).map(|q| p.gap / (p.strike * p.strike) * q))
        .fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        return Err(Error::NoStrip);
    }
    let sigma2 = slice.scale() * sum - slice.adjustment();
    if !(sigma2 > 0.0) {
        return Err(Error::NonPositiveVariance(sigma2));
    }
    Ok(VarianceResult { sigma2, side, n_strikes: n })
}

/// `σ²₊ + σ²₋ − σ²` for one expiry: the `K₀` strike counted a second time,
/// less one extra forward adjustment.
pub fn k0_excess(slice: &ExpirySlice) -> f64 {
    let at_k0 = slice.strip.iter().find(|p| p.strike == slice.k0);
    let doubled = at_k0.map_or(0.0, |p| {
        let both = p.call.unwrap_or(0.0) + p.put.unwrap_or(0.0);
        let aggregate = p.contribution(slice.k0, Side::All).unwrap_or(0.0);
        p.gap / (p.strike * p.strike) * (both - aggregate)
    });
    slice.scale() * doubled - slice.adjustment()
}

/// Variance at one expiry, keyed by calendar days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub days: i64,
    pub sigma2: f64,
}

fn interpolation_weights(days_near: i64, days_next: i64) -> (f64, f64) {
    let span = (days_next - days_near) as f64;
    let t1 = days_near as f64 / DAYS_PER_YEAR;
    let t2 = days_next as f64 / DAYS_PER_YEAR;
    let scale = DAYS_PER_YEAR / TARGET_DAYS as f64;
    (
        scale * t1 * (days_next - TARGET_DAYS) as f64 / span,
        scale * t2 * (TARGET_DAYS - days_near) as f64 / span,
    )
}

/// Constant-maturity 30-day index from two expiries, in volatility points.
pub fn interpolate_index(near: Term, next: Term) -> Result<f64> {
    if near.days <= 0 || near.days >= next.days {
        return Err(Error::ExpiryOrder(near.days, next.days));
    }
    let (w1, w2) = interpolation_weights(near.days, next.days);
    let var = w1 * near.sigma2 + w2 * next.sigma2;
    if !(var >= 0.0) {
        return Err(Error::NegativeInterpolation {
            sigma2_near: near.sigma2,
            sigma2_next: next.sigma2,
            days_near: near.days,
            days_next: next.days,
        });
    }
    Ok(100.0 * var.sqrt())
}

/// The two expiry slices used for one day's indexes.
#[derive(Debug, Clone, PartialEq)]
pub struct DaySlices {
    pub near: ExpirySlice,
    pub next: ExpirySlice,
}

impl DaySlices {
    pub fn build(chain: &OptionChainDay, curve: Option<&RateCurveDay>, cfg: &VolIndexConfig) -> Result<Self> {
        let (near, next) = select_expiries(chain, cfg)?;
        let slice = |expiry: NaiveDate| -> Result<ExpirySlice> {
            let quotes = chain.slices.iter().find(|s| s.expiry == expiry).expect("selected expiry exists");
            let days = quotes.days_to_expiry(chain.quote_date);
            let rate = curve.map_or(0.0, |c| c.rate_for(days));
            ExpirySlice::from_quotes(quotes, chain.quote_date, rate)
        };
        Ok(DaySlices { near: slice(near)?, next: slice(next)? })
    }

    pub fn index(&self, side: Side) -> Result<f64> {
        let v1 = variance_strip(&self.near, side)?;
        let v2 = variance_strip(&self.next, side)?;
        interpolate_index(
            Term { days: self.near.days, sigma2: v1.sigma2 },
            Term { days: self.next.days, sigma2: v2.sigma2 },
        )
    }

    /// `VIX⁺² + VIX⁻² − VIX²` implied by the `K₀` double count.
    pub fn decomposition_gap(&self) -> f64 {
        let (w1, w2) = interpolation_weights(self.near.days, self.next.days);
        1e4 * (w1 * k0_excess(&self.near) + w2 * k0_excess(&self.next))
    }
}

/// Per-flavor indexes for one (name, date); each flavor fails independently.
#[derive(Debug)]
pub struct DayIndexes {
    pub aggregate: Result<f64>,
    pub positive: Result<f64>,
    pub negative: Result<f64>,
}

impl DayIndexes {
    pub fn get(&self, flavor: Flavor) -> &Result<f64> {
        match flavor {
            Flavor::Aggregate => &self.aggregate,
            Flavor::Positive => &self.positive,
            Flavor::Negative => &self.negative,
        }
    }
}

pub fn day_indexes(chain: &OptionChainDay, curve: Option<&RateCurveDay>, cfg: &VolIndexConfig) -> Result<DayIndexes> {
    let slices = DaySlices::build(chain, curve, cfg)?;
    Ok(DayIndexes {
        aggregate: slices.index(Side::All),
        positive: slices.index(Side::CallsOnly),
        negative: slices.index(Side::PutsOnly),
    })
}

/// Daily index values, rows = dates, columns = names.
#[derive(Debug, Clone, PartialEq)]
pub struct VolPanel {
    pub dates: Vec<NaiveDate>,
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
    pub flavor: Flavor,
}

impl VolPanel {
    pub fn new(dates: Vec<NaiveDate>, names: Vec<String>, values: DMatrix<f64>, flavor: Flavor) -> Result<Self> {
        if values.nrows() != dates.len() || values.ncols() != names.len() {
            return Err(Error::InvalidArgument(format!(
                "panel is {}x{} but axes are {}x{}",
                values.nrows(),
                values.ncols(),
                dates.len(),
                names.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument("panel values must be finite and non-negative".into()));
        }
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("panel dates must be strictly increasing".into()));
        }
        Ok(VolPanel { dates, names, values, flavor })
    }

    pub fn n_obs(&self) -> usize {
        self.dates.len()
    }

    pub fn n_names(&self) -> usize {
        self.names.len()
    }

    /// Writes `date,name1,name2,...` with six decimals.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let map = |e| Error::csv("<output>", e);
        let mut header = vec!["date".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header).map_err(map)?;
        for (i, date) in self.dates.iter().enumerate() {
            let mut row = vec![date.to_string()];
            row.extend(self.values.row(i).iter().map(|v| format!("{v:.6}")));
            w.write_record(&row).map_err(map)?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))
    }

    pub fn read_csv<R: Read>(reader: R, flavor: Flavor) -> Result<Self> {
        let mut rdr = csv_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::csv("<input>", e))?.clone();
        if headers.get(0) != Some("date") || headers.len() < 2 {
            return Err(Error::Schema("panel must start with a date column followed by names".into()));
        }
        let names: Vec<String> = headers.iter().skip(1).map(String::from).collect();
        let mut dates = Vec::new();
        let mut values = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::csv("<input>", e))?;
            dates.push(parse_date(&record[0])?);
            for cell in record.iter().skip(1) {
                values.push(cell.parse::<f64>().map_err(|_| Error::Format(format!("bad panel value {cell:?}")))?);
            }
        }
        let m = DMatrix::from_row_slice(dates.len(), names.len(), &values);
        VolPanel::new(dates, names, m, flavor)
    }

    pub fn load(path: &Path, flavor: Flavor) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, flavor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapEntry {
    pub name: String,
    pub date: NaiveDate,
    pub flavor: Flavor,
    pub reason: String,
    /// False when the date was trimmed rather than carried forward.
    pub filled: bool,
}

/// Output of [`build_panels`].
#[derive(Debug, Clone, PartialEq)]
pub struct PanelSet {
    pub aggregate: VolPanel,
    pub positive: VolPanel,
    pub negative: VolPanel,
    pub gaps: Vec<GapEntry>,
}

impl PanelSet {
    pub fn get(&self, flavor: Flavor) -> &VolPanel {
        match flavor {
            Flavor::Aggregate => &self.aggregate,
            Flavor::Positive => &self.positive,
            Flavor::Negative => &self.negative,
        }
    }
}

type IndexGrid = BTreeMap<(String, NaiveDate), std::result::Result<[Option<f64>; 3], String>>;
type SideFailures = BTreeMap<(String, NaiveDate, Flavor), String>;

fn compute_grid(chains: &[OptionChainDay], rates: &RateBook, cfg: &VolIndexConfig) -> (Vec<String>, Vec<NaiveDate>, IndexGrid, SideFailures) {
    let names: Vec<String> = chains.iter().map(|c| c.underlier.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let dates: Vec<NaiveDate> = chains.iter().map(|c| c.quote_date).collect::<BTreeSet<_>>().into_iter().collect();
    let results: Vec<_> = chains
        .par_iter()
        .map(|chain| {
            let curve = rates.curve_for(chain.quote_date);
            ((chain.underlier.clone(), chain.quote_date), day_indexes(chain, curve, cfg))
        })
        .collect();
    let mut grid = IndexGrid::new();
    let mut reasons = BTreeMap::new();
    for (key, res) in results {
        match res {
            Ok(day) => {
                let mut vals = [None; 3];
                for (slot, flavor) in vals.iter_mut().zip(Flavor::ALL) {
                    match day.get(flavor) {
                        Ok(v) => *slot = Some(*v),
                        Err(e) => {
                            reasons.insert((key.0.clone(), key.1, flavor), e.to_string());
                        }
                    }
                }
                grid.insert(key, Ok(vals));
            }
            Err(e) => {
                grid.insert(key, Err(e.to_string()));
            }
        }
    }
    (names, dates, grid, reasons)
}

/// Dense panels for all three flavors from per-name daily chains.
///
/// A missing or failed (name, date) carries the previous value forward and is
/// listed in the gap report. Leading gaps follow `cfg.leading_gap`; with
/// `Trim`, dates before every name has a value are dropped from all panels.
pub fn build_panels(chains: &[OptionChainDay], rates: &RateBook, cfg: &VolIndexConfig) -> Result<PanelSet> {
    let (names, dates, grid, reasons) = compute_grid(chains, rates, cfg);
    let mut gaps = Vec::new();
    let mut columns: Vec<Vec<Vec<Option<f64>>>> = vec![vec![Vec::with_capacity(dates.len()); names.len()]; 3];
    for (j, name) in names.iter().enumerate() {
        for &date in &dates {
            let key = (name.clone(), date);
            for (f, flavor) in Flavor::ALL.into_iter().enumerate() {
                let value = match grid.get(&key) {
                    None => {
                        gaps.push((name.clone(), date, flavor, "no chain".to_string()));
                        None
                    }
                    Some(Err(reason)) => {
                        gaps.push((name.clone(), date, flavor, reason.clone()));
                        None
                    }
                    Some(Ok(vals)) => {
                        if vals[f].is_none() {
                            gaps.push((name.clone(), date, flavor, reasons[&(name.clone(), date, flavor)].clone()));
                        }
                        vals[f]
                    }
                };
                columns[f][j].push(value);
            }
        }
    }

    // first date index at which every (name, flavor) has a value
    let mut start = 0;
    for (f, flavor_cols) in columns.iter().enumerate() {
        for (j, col) in flavor_cols.iter().enumerate() {
            let first = col.iter().position(Option::is_some).ok_or_else(|| {
                Error::NoComputableDays(format!("{} ({})", names[j], Flavor::ALL[f]))
            })?;
            if first > 0 && cfg.leading_gap == LeadingGapPolicy::Error {
                return Err(Error::LeadingGap { name: names[j].clone(), first: dates[first] });
            }
            start = start.max(first);
        }
    }

    let kept_dates: Vec<NaiveDate> = dates[start..].to_vec();
    let report: Vec<GapEntry> = gaps
        .into_iter()
        .map(|(name, date, flavor, reason)| GapEntry { filled: date >= dates[start], name, date, flavor, reason })
        .collect();

    let mut panels = Vec::with_capacity(3);
    for (f, flavor) in Flavor::ALL.into_iter().enumerate() {
        let mut m = DMatrix::zeros(kept_dates.len(), names.len());
        for (j, col) in columns[f].iter().enumerate() {
            let mut last = col[..=start].iter().rev().find_map(|v| *v);
            for (i, v) in col[start..].iter().enumerate() {
                if v.is_some() {
                    last = *v;
                }
                m[(i, j)] = last.expect("value present from start");
            }
        }
        panels.push(VolPanel::new(kept_dates.clone(), names.clone(), m, flavor)?);
    }
    let negative = panels.pop().unwrap();
    let positive = panels.pop().unwrap();
    let aggregate = panels.pop().unwrap();
    Ok(PanelSet { aggregate, positive, negative, gaps: report })
}

/// Dense panel for a single flavor. See [`build_panels`].
pub fn build_panel(chains: &[OptionChainDay], rates: &RateBook, flavor: Flavor, cfg: &VolIndexConfig) -> Result<(VolPanel, Vec<GapEntry>)> {
    let set = build_panels(chains, rates, cfg)?;
    let gaps = set.gaps.iter().filter(|g| g.flavor == flavor).cloned().collect();
    let panel = match flavor {
        Flavor::Aggregate => set.aggregate,
        Flavor::Positive => set.positive,
        Flavor::Negative => set.negative,
    };
    Ok((panel, gaps))
}

/// Market-cap weights over `names`, summing to one.
pub fn sector_weights(names: &[String], caps: &MarketCapTable) -> Result<Vec<f64>> {
    let raw = names
        .iter()
        .map(|n| caps.get(n).ok_or_else(|| Error::MissingCap(n.clone())))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|c| c / total).collect())
}

/// Cap-weighted sector index, one value per panel date.
pub fn sector_index(panel: &VolPanel, caps: &MarketCapTable) -> Result<Vec<f64>> {
    let w = sector_weights(&panel.names, caps)?;
    Ok(panel.values.row_iter().map(|row| row.iter().zip(&w).map(|(v, w)| v * w).sum()).collect())
}
