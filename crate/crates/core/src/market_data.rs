//! Typed ingestion of option chains, rate curves, market capitalizations and
//! monthly indicator series.
//!
//! All inputs are delimited text with a header row. Dates are ISO-8601
//! (`YYYY-MM-DD`), months are `YYYY-MM` (a full date is accepted and truncated
//! to its month). Lines starting with `#` are treated as comments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Right {
    Call,
    Put,
}

impl FromStr for Right {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c" | "call" => Ok(Right::Call),
            "p" | "put" => Ok(Right::Put),
            other => Err(Error::Format(format!("unknown option right {other:?}"))),
        }
    }
}

impl fmt::Display for Right {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Right::Call => "C",
            Right::Put => "P",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptionQuote {
    pub strike: f64,
    pub right: Right,
    pub bid: f64,
    pub ask: f64,
    pub expiry: NaiveDate,
    pub quote_date: NaiveDate,
}

impl OptionQuote {
    pub fn mid(&self) -> f64 {
        0.5 * (self.bid + self.ask)
    }

    /// Calendar days from quote date to expiry.
    pub fn days_to_expiry(&self) -> i64 {
        (self.expiry - self.quote_date).num_days()
    }

    fn violation(&self) -> Option<DropReason> {
        if !(self.strike.is_finite() && self.bid.is_finite() && self.ask.is_finite()) {
            return Some(DropReason::NonFinite);
        }
        if self.strike <= 0.0 {
            return Some(DropReason::NonPositiveStrike);
        }
        if self.bid < 0.0 {
            return Some(DropReason::NegativeBid);
        }
        if self.ask < self.bid {
            return Some(DropReason::CrossedQuote);
        }
        if self.expiry <= self.quote_date {
            return Some(DropReason::Expired);
        }
        if self.bid == 0.0 {
            return Some(DropReason::ZeroBid);
        }
        None
    }
}

/// Quotes sharing one expiry, sorted by (right, strike).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpiryQuotes {
    pub expiry: NaiveDate,
    pub quotes: Vec<OptionQuote>,
}

impl ExpiryQuotes {
    pub fn days_to_expiry(&self, quote_date: NaiveDate) -> i64 {
        (self.expiry - quote_date).num_days()
    }

    pub fn quotes_for(&self, right: Right) -> impl Iterator<Item = &OptionQuote> {
        self.quotes.iter().filter(move |q| q.right == right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptionChainDay {
    pub underlier: String,
    pub quote_date: NaiveDate,
    pub slices: Vec<ExpiryQuotes>,
}

impl OptionChainDay {
    /// Builds a chain from loose quotes, sorting slices by expiry and quotes
    /// by (right, strike). Duplicate (strike, right) pairs keep the first quote.
    pub fn from_quotes(underlier: impl Into<String>, quote_date: NaiveDate, quotes: Vec<OptionQuote>) -> Self {
        let mut by_expiry: BTreeMap<NaiveDate, Vec<OptionQuote>> = BTreeMap::new();
        for q in quotes {
            by_expiry.entry(q.expiry).or_default().push(q);
        }
        let slices = by_expiry
            .into_iter()
            .map(|(expiry, mut quotes)| {
                quotes.sort_by(|a, b| a.right.cmp(&b.right).then(a.strike.total_cmp(&b.strike)));
                quotes.dedup_by(|b, a| a.right == b.right && a.strike == b.strike);
                ExpiryQuotes { expiry, quotes }
            })
            .collect();
        OptionChainDay { underlier: underlier.into(), quote_date, slices }
    }

    pub fn n_quotes(&self) -> usize {
        self.slices.iter().map(|s| s.quotes.len()).sum()
    }
}

/// Column names for option chain files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSchema {
    pub date: String,
    pub expiry: String,
    pub strike: String,
    pub right: String,
    pub bid: String,
    pub ask: String,
    /// Optional; when the column is absent every row belongs to `default_underlier`.
    pub underlier: String,
    pub default_underlier: String,
}

impl Default for ChainSchema {
    fn default() -> Self {
        ChainSchema {
            date: "date".into(),
            expiry: "expiry".into(),
            strike: "strike".into(),
            right: "right".into(),
            bid: "bid".into(),
            ask: "ask".into(),
            underlier: "underlier".into(),
            default_underlier: "UNDERLIER".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    Unparseable,
    NonFinite,
    NonPositiveStrike,
    NegativeBid,
    CrossedQuote,
    Expired,
    ZeroBid,
    Duplicate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DropReport {
    pub input_rows: usize,
    pub kept_rows: usize,
    pub by_reason: BTreeMap<DropReason, usize>,
}

impl DropReport {
    pub fn dropped(&self) -> usize {
        self.by_reason.values().sum()
    }

    fn record(&mut self, reason: DropReason) {
        *self.by_reason.entry(reason).or_default() += 1;
    }
}

pub(crate) fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader)
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

fn required_column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    column(headers, name).ok_or_else(|| Error::Schema(format!("missing required column {name:?}")))
}

pub fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|e| Error::Format(format!("bad date {s:?}: {e}")))
}

/// Loads option quotes from a delimited file.
///
/// Rows that fail to parse or violate quote invariants are dropped and counted;
/// a quote with a zero bid is treated as untradeable and also dropped.
pub fn load_option_chains(path: &Path, schema: &ChainSchema) -> Result<(Vec<OptionChainDay>, DropReport)> {
    let file = open(path)?;
    read_option_chains(file, schema).map_err(|e| match e {
        Error::EmptyInput(_) => Error::EmptyInput(path.to_path_buf()),
        Error::Csv { source, .. } => Error::csv(path, source),
        other => other,
    })
}

pub fn read_option_chains<R: Read>(reader: R, schema: &ChainSchema) -> Result<(Vec<OptionChainDay>, DropReport)> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::csv("<input>", e))?.clone();
    let i_date = required_column(&headers, &schema.date)?;
    let i_expiry = required_column(&headers, &schema.expiry)?;
    let i_strike = required_column(&headers, &schema.strike)?;
    let i_right = required_column(&headers, &schema.right)?;
    let i_bid = required_column(&headers, &schema.bid)?;
    let i_ask = required_column(&headers, &schema.ask)?;
    let i_under = column(&headers, &schema.underlier);

    let mut report = DropReport::default();
    let mut grouped: BTreeMap<(String, NaiveDate), BTreeMap<NaiveDate, Vec<OptionQuote>>> = BTreeMap::new();
    let mut seen: BTreeSet<(String, NaiveDate, NaiveDate, Right, u64)> = BTreeSet::new();

    for record in rdr.records() {
        report.input_rows += 1;
        let Ok(record) = record else {
            report.record(DropReason::Unparseable);
            continue;
        };
        let parsed = (|| -> Option<(String, OptionQuote)> {
            let underlier = match i_under {
                Some(i) => record.get(i)?.to_string(),
                None => schema.default_underlier.clone(),
            };
            let quote = OptionQuote {
                quote_date: parse_date(record.get(i_date)?).ok()?,
                expiry: parse_date(record.get(i_expiry)?).ok()?,
                strike: record.get(i_strike)?.parse().ok()?,
                right: record.get(i_right)?.parse().ok()?,
                bid: record.get(i_bid)?.parse().ok()?,
                ask: record.get(i_ask)?.parse().ok()?,
            };
            Some((underlier, quote))
        })();
        let Some((underlier, quote)) = parsed else {
            report.record(DropReason::Unparseable);
            continue;
        };
        if let Some(reason) = quote.violation() {
            report.record(reason);
            continue;
        }
        let key = (underlier.clone(), quote.quote_date, quote.expiry, quote.right, quote.strike.to_bits());
        if !seen.insert(key) {
            report.record(DropReason::Duplicate);
            continue;
        }
        report.kept_rows += 1;
        grouped
            .entry((underlier, quote.quote_date))
            .or_default()
            .entry(quote.expiry)
            .or_default()
            .push(quote);
    }

    if report.kept_rows == 0 {
        return Err(Error::EmptyInput("<input>".into()));
    }

    let chains = grouped
        .into_iter()
        .map(|((underlier, quote_date), slices)| OptionChainDay {
            underlier,
            quote_date,
            slices: slices
                .into_iter()
                .map(|(expiry, mut quotes)| {
                    quotes.sort_by(|a, b| a.right.cmp(&b.right).then(a.strike.total_cmp(&b.strike)));
                    ExpiryQuotes { expiry, quotes }
                })
                .collect(),
        })
        .collect();
    Ok((chains, report))
}

/// Writes chains in the default schema. Floats use their shortest
/// round-trip representation.
pub fn write_option_chains<W: Write>(writer: W, chains: &[OptionChainDay]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let map = |e| Error::csv("<output>", e);
    w.write_record(["date", "expiry", "strike", "right", "bid", "ask", "underlier"]).map_err(map)?;
    for chain in chains {
        for slice in &chain.slices {
            for q in &slice.quotes {
                w.write_record([
                    q.quote_date.to_string(),
                    q.expiry.to_string(),
                    q.strike.to_string(),
                    q.right.to_string(),
                    q.bid.to_string(),
                    q.ask.to_string(),
                    chain.underlier.clone(),
                ])
                .map_err(map)?;
            }
        }
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

/// Annualized rates by tenor for one date.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurveDay {
    pub quote_date: NaiveDate,
    /// `(days to maturity, rate)`, strictly increasing in days.
    pub tenors: Vec<(i64, f64)>,
}

impl RateCurveDay {
    pub fn new(quote_date: NaiveDate, mut tenors: Vec<(i64, f64)>) -> Result<Self> {
        if tenors.is_empty() {
            return Err(Error::InvalidArgument(format!("empty rate curve on {quote_date}")));
        }
        tenors.sort_by_key(|t| t.0);
        if tenors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Format(format!("duplicate tenor in rate curve on {quote_date}")));
        }
        if tenors.iter().any(|t| !t.1.is_finite()) {
            return Err(Error::Format(format!("non-finite rate on {quote_date}")));
        }
        Ok(RateCurveDay { quote_date, tenors })
    }

    /// Rate at `days`: exact knot, else linear between bracketing knots,
    /// else flat beyond the ends.
    pub fn rate_for(&self, days: i64) -> f64 {
        let t = &self.tenors;
        let (first, last) = (t[0], t[t.len() - 1]);
        if days <= first.0 {
            return first.1;
        }
        if days >= last.0 {
            return last.1;
        }
        let hi = t.partition_point(|k| k.0 < days);
        let (d1, r1) = t[hi - 1];
        let (d2, r2) = t[hi];
        if d2 == days {
            return r2;
        }
        r1 + (r2 - r1) * (days - d1) as f64 / (d2 - d1) as f64
    }
}

pub fn rate_for(curve: &RateCurveDay, days: i64) -> f64 {
    curve.rate_for(days)
}

/// Rate curves keyed by date. A date without its own curve uses the most
/// recent earlier curve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateBook {
    curves: BTreeMap<NaiveDate, RateCurveDay>,
}

impl RateBook {
    pub fn new(curves: impl IntoIterator<Item = RateCurveDay>) -> Self {
        RateBook { curves: curves.into_iter().map(|c| (c.quote_date, c)).collect() }
    }

    /// A book holding one constant rate, usable for any date.
    pub fn flat(rate: f64) -> Self {
        let d = NaiveDate::MIN;
        RateBook::new([RateCurveDay { quote_date: d, tenors: vec![(1, rate)] }])
    }

    pub fn curve_for(&self, date: NaiveDate) -> Option<&RateCurveDay> {
        self.curves.range(..=date).next_back().map(|(_, c)| c)
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}

pub fn load_rate_curves(path: &Path) -> Result<RateBook> {
    let mut rdr = csv_reader(open(path)?);
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
    let i_date = required_column(&headers, "date")?;
    let i_tenor = required_column(&headers, "tenor_days")?;
    let i_rate = required_column(&headers, "rate")?;
    let mut by_date: BTreeMap<NaiveDate, Vec<(i64, f64)>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let date = parse_date(&record[i_date])?;
        let tenor: i64 = record[i_tenor]
            .parse()
            .map_err(|_| Error::Format(format!("bad tenor {:?}", &record[i_tenor])))?;
        let rate: f64 = record[i_rate]
            .parse()
            .map_err(|_| Error::Format(format!("bad rate {:?}", &record[i_rate])))?;
        if tenor < 0 {
            return Err(Error::Format(format!("negative tenor {tenor}")));
        }
        by_date.entry(date).or_default().push((tenor, rate));
    }
    if by_date.is_empty() {
        return Err(Error::EmptyInput(path.to_path_buf()));
    }
    let curves = by_date
        .into_iter()
        .map(|(d, t)| RateCurveDay::new(d, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(RateBook::new(curves))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketCapTable {
    entries: BTreeMap<String, f64>,
}

impl MarketCapTable {
    pub fn new(entries: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (name, cap) in entries {
            if !(cap.is_finite() && cap > 0.0) {
                return Err(Error::Format(format!("market cap for {name} must be positive, got {cap}")));
            }
            if map.insert(name.clone(), cap).is_some() {
                return Err(Error::Format(format!("duplicate market cap entry {name}")));
            }
        }
        Ok(MarketCapTable { entries: map })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

pub fn load_market_caps(path: &Path) -> Result<MarketCapTable> {
    let mut rdr = csv_reader(open(path)?);
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
    let i_name = required_column(&headers, "name")?;
    let i_cap = required_column(&headers, "avg_mktcap")?;
    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let cap: f64 = record[i_cap]
            .parse()
            .map_err(|_| Error::Format(format!("bad market cap {:?}", &record[i_cap])))?;
        entries.push((record[i_name].to_string(), cap));
    }
    if entries.is_empty() {
        return Err(Error::EmptyInput(path.to_path_buf()));
    }
    MarketCapTable::new(entries)
}

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month {
    pub year: i32,
    /// 1..=12
    pub month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Self {
        assert!((1..=12).contains(&month), "month out of range: {month}");
        Month { year, month }
    }

    pub fn of(date: NaiveDate) -> Self {
        Month { year: date.year(), month: date.month() }
    }

    /// Months since year 0, as a linear index.
    pub fn index(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_index(idx: i64) -> Self {
        Month { year: idx.div_euclid(12) as i32, month: (idx.rem_euclid(12) + 1) as u32 }
    }

    pub fn offset(self, months: i64) -> Self {
        Month::from_index(self.index() + months)
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Format(format!("unparseable month {s:?}"));
        let mut parts = s.split('-');
        let year: i32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let month: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        match parts.next() {
            None => {}
            Some(day) => {
                let day: u32 = day.parse().map_err(|_| bad())?;
                NaiveDate::from_ymd_opt(year, month, day).ok_or_else(bad)?;
            }
        }
        if parts.next().is_some() || !(1..=12).contains(&month) {
            return Err(bad());
        }
        Ok(Month { year, month })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frequency {
    Monthly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    Continuous,
    Binary,
}

/// A monthly series; `None` marks a gap, never imputed.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    pub name: String,
    pub frequency: Frequency,
    pub observations: Vec<(Month, Option<f64>)>,
    pub kind: IndicatorKind,
}

impl IndicatorSeries {
    /// Builds a series, classifying it as binary when every observed value is 0 or 1.
    pub fn new(name: impl Into<String>, observations: Vec<(Month, Option<f64>)>) -> Result<Self> {
        let name = name.into();
        if observations.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Format(format!("months of {name} are not strictly increasing")));
        }
        let observed: Vec<f64> = observations.iter().filter_map(|o| o.1).collect();
        let binary = !observed.is_empty() && observed.iter().all(|&v| v == 0.0 || v == 1.0);
        Ok(IndicatorSeries {
            name,
            frequency: Frequency::Monthly,
            observations,
            kind: if binary { IndicatorKind::Binary } else { IndicatorKind::Continuous },
        })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn gaps(&self) -> usize {
        self.observations.iter().filter(|o| o.1.is_none()).count()
    }

    pub fn get(&self, month: Month) -> Option<f64> {
        self.observations
            .binary_search_by(|o| o.0.cmp(&month))
            .ok()
            .and_then(|i| self.observations[i].1)
    }
}

/// Loads a `month, series...` file into one series per column.
pub fn load_indicators(path: &Path) -> Result<Vec<IndicatorSeries>> {
    read_indicators(open(path)?).map_err(|e| match e {
        Error::Csv { source, .. } => Error::csv(path, source),
        other => other,
    })
}

pub fn read_indicators<R: Read>(reader: R) -> Result<Vec<IndicatorSeries>> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::csv("<input>", e))?.clone();
    let i_month = required_column(&headers, "month")?;
    let names: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != i_month)
        .map(|(i, h)| (i, h.to_string()))
        .collect();
    let mut columns: Vec<Vec<(Month, Option<f64>)>> = vec![Vec::new(); names.len()];
    for record in rdr.records() {
        let record = record.map_err(|e| Error::csv("<input>", e))?;
        let month: Month = record[i_month].parse()?;
        for (col, (i, name)) in names.iter().enumerate() {
            let cell = record.get(*i).unwrap_or("").trim();
            let value = if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
                None
            } else {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| Error::Format(format!("bad value {cell:?} in column {name}")))?;
                Some(v)
            };
            columns[col].push((month, value));
        }
    }
    names
        .into_iter()
        .zip(columns)
        .map(|((_, name), obs)| IndicatorSeries::new(name, obs))
        .collect()
}

/// Writes `date,tenor_days,rate` rows.
pub fn write_rate_curves<W: Write>(writer: W, curves: &[RateCurveDay]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let map = |e| Error::csv("<output>", e);
    w.write_record(["date", "tenor_days", "rate"]).map_err(map)?;
    for c in curves {
        for (days, rate) in &c.tenors {
            w.write_record([c.quote_date.to_string(), days.to_string(), rate.to_string()]).map_err(map)?;
        }
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

impl MarketCapTable {
    /// Writes `name,avg_mktcap` rows in name order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let map = |e| Error::csv("<output>", e);
        w.write_record(["name", "avg_mktcap"]).map_err(map)?;
        for (name, cap) in self.iter() {
            w.write_record([name.to_string(), cap.to_string()]).map_err(map)?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))
    }
}

/// Writes series side by side on the union of their months; gaps are blank.
pub fn write_indicators<W: Write>(writer: W, series: &[IndicatorSeries]) -> Result<()> {
    let months: BTreeSet<Month> =
        series.iter().flat_map(|s| s.observations.iter().map(|o| o.0)).collect();
    let mut w = csv::Writer::from_writer(writer);
    let map = |e| Error::csv("<output>", e);
    let mut header = vec!["month".to_string()];
    header.extend(series.iter().map(|s| s.name.clone()));
    w.write_record(&header).map_err(map)?;
    for m in months {
        let mut row = vec![m.to_string()];
        row.extend(series.iter().map(|s| s.get(m).map(|v| v.to_string()).unwrap_or_default()));
        w.write_record(&row).map_err(map)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        parse_date(s).unwrap()
    }

    const HEADER: &str = "date,expiry,strike,right,bid,ask,underlier\n";

    #[test]
    fn three_clean_rows_make_one_chain() {
        let data = format!(
            "{HEADER}2020-01-02,2020-02-21,100,C,1.0,1.2,JPM\n2020-01-02,2020-02-21,100,P,0.9,1.1,JPM\n2020-01-02,2020-02-21,105,C,0.5,0.6,JPM\n"
        );
        let (chains, report) = read_option_chains(data.as_bytes(), &ChainSchema::default()).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].n_quotes(), 3);
        assert_eq!(report.dropped(), 0);
        assert_eq!(report.kept_rows, 3);
    }

    #[test]
    fn crossed_quote_is_dropped() {
        let data = format!(
            "{HEADER}2020-01-02,2020-02-21,100,C,1.3,1.2,JPM\n2020-01-02,2020-02-21,100,P,0.9,1.1,JPM\n"
        );
        let (chains, report) = read_option_chains(data.as_bytes(), &ChainSchema::default()).unwrap();
        assert_eq!(report.dropped(), 1);
        assert_eq!(report.by_reason[&DropReason::CrossedQuote], 1);
        assert_eq!(chains[0].n_quotes(), 1);
    }

    #[test]
    fn zero_bid_and_duplicates_are_dropped() {
        let data = format!(
            "{HEADER}2020-01-02,2020-02-21,100,C,0,0.05,JPM\n2020-01-02,2020-02-21,100,P,0.9,1.1,JPM\n2020-01-02,2020-02-21,100,P,0.8,1.0,JPM\nbad,row,x,C,1,1,JPM\n"
        );
        let (_, report) = read_option_chains(data.as_bytes(), &ChainSchema::default()).unwrap();
        assert_eq!(report.by_reason[&DropReason::ZeroBid], 1);
        assert_eq!(report.by_reason[&DropReason::Duplicate], 1);
        assert_eq!(report.by_reason[&DropReason::Unparseable], 1);
        assert_eq!(report.dropped() + report.kept_rows, report.input_rows);
    }

    #[test]
    fn two_quote_dates_in_date_order() {
        let data = format!(
            "{HEADER}2020-01-03,2020-02-21,100,C,1.0,1.2,JPM\n2020-01-02,2020-02-21,100,C,1.0,1.2,JPM\n2020-01-03,2020-03-20,100,P,1.0,1.2,JPM\n"
        );
        let (chains, _) = read_option_chains(data.as_bytes(), &ChainSchema::default()).unwrap();
        assert_eq!(chains.len(), 2);
        assert_eq!(chains[0].quote_date, d("2020-01-02"));
        assert_eq!(chains[1].quote_date, d("2020-01-03"));
        assert_eq!(chains[1].slices.len(), 2);
    }

    #[test]
    fn missing_column_is_schema_error() {
        let data = "date,expiry,strike,right,bid\n2020-01-02,2020-02-21,100,C,1.0\n";
        let err = read_option_chains(data.as_bytes(), &ChainSchema::default()).unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
    }

    #[test]
    fn all_rows_bad_is_empty_input() {
        let data = format!("{HEADER}2020-01-02,2020-02-21,100,C,2.0,1.0,JPM\n");
        let err = read_option_chains(data.as_bytes(), &ChainSchema::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
    }

    #[test]
    fn custom_schema_without_underlier_column() {
        let schema = ChainSchema {
            date: "QuoteDate".into(),
            right: "cp_flag".into(),
            default_underlier: "BAC".into(),
            ..ChainSchema::default()
        };
        let data = "QuoteDate,expiry,strike,cp_flag,bid,ask\n2020-01-02,2020-02-21,30,put,0.5,0.6\n";
        let (chains, _) = read_option_chains(data.as_bytes(), &schema).unwrap();
        assert_eq!(chains[0].underlier, "BAC");
        assert_eq!(chains[0].slices[0].quotes[0].right, Right::Put);
    }

    #[test]
    fn rate_interpolation_rules() {
        let one = RateCurveDay::new(d("2020-01-02"), vec![(30, 0.02)]).unwrap();
        assert_eq!(one.rate_for(30), 0.02);
        let two = RateCurveDay::new(d("2020-01-02"), vec![(10, 0.01), (30, 0.03)]).unwrap();
        assert!((two.rate_for(20) - 0.02).abs() < 1e-15);
        assert_eq!(two.rate_for(60), 0.03);
        assert_eq!(two.rate_for(0), 0.01);
        assert_eq!(two.rate_for(30), 0.03);
    }

    #[test]
    fn rate_book_uses_latest_prior_curve() {
        let book = RateBook::new([
            RateCurveDay::new(d("2020-01-02"), vec![(30, 0.01)]).unwrap(),
            RateCurveDay::new(d("2020-01-06"), vec![(30, 0.02)]).unwrap(),
        ]);
        assert_eq!(book.curve_for(d("2020-01-03")).unwrap().rate_for(30), 0.01);
        assert_eq!(book.curve_for(d("2020-01-06")).unwrap().rate_for(30), 0.02);
        assert!(book.curve_for(d("2019-12-31")).is_none());
    }

    #[test]
    fn indicators_columns_binary_and_gaps() {
        let data = "month,ADS,NBER\n2008-01,0.5,1\n2008-02,,1\n2008-03,-0.2,0\n";
        let series = read_indicators(data.as_bytes()).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series[0].len(), 3);
        assert_eq!(series[0].kind, IndicatorKind::Continuous);
        assert_eq!(series[0].gaps(), 1);
        assert_eq!(series[1].kind, IndicatorKind::Binary);
        assert_eq!(series[1].get(Month::new(2008, 2)), Some(1.0));
    }

    #[test]
    fn unparseable_month_is_format_error() {
        let data = "month,ADS\n2008-13,0.5\n";
        assert!(matches!(read_indicators(data.as_bytes()), Err(Error::Format(_))));
        let data = "month,ADS\nJan 2008,0.5\n";
        assert!(matches!(read_indicators(data.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn month_arithmetic() {
        let m = Month::new(2008, 11);
        assert_eq!(m.offset(2), Month::new(2009, 1));
        assert_eq!(m.offset(-11), Month::new(2007, 12));
        assert_eq!("2008-11-28".parse::<Month>().unwrap(), m);
        assert_eq!(m.to_string(), "2008-11");
    }

    #[test]
    fn caps_validation() {
        assert!(MarketCapTable::new([("A".to_string(), 0.0)]).is_err());
        assert!(MarketCapTable::new([("A".to_string(), 1.0), ("A".to_string(), 2.0)]).is_err());
    }

    #[test]
    fn auxiliary_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let curves = vec![RateCurveDay::new(d("2020-01-02"), vec![(7, 0.01), (30, 0.0125)]).unwrap()];
        let path = dir.path().join("rates.csv");
        write_rate_curves(std::fs::File::create(&path).unwrap(), &curves).unwrap();
        assert_eq!(load_rate_curves(&path).unwrap().curve_for(d("2020-01-03")), Some(&curves[0]));

        let caps = MarketCapTable::new([("B".to_string(), 2.5), ("A".to_string(), 1.0)]).unwrap();
        let path = dir.path().join("caps.csv");
        caps.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
        assert_eq!(load_market_caps(&path).unwrap(), caps);

        let a = IndicatorSeries::new("A", vec![(Month::new(2020, 1), Some(1.5)), (Month::new(2020, 2), None)]).unwrap();
        let b = IndicatorSeries::new("B", vec![(Month::new(2020, 2), Some(1.0))]).unwrap();
        let mut buf = Vec::new();
        write_indicators(&mut buf, &[a, b]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "month,A,B\n2020-01,1.5,\n2020-02,,1\n");
        let back = read_indicators(&buf[..]).unwrap();
        assert_eq!(back[0].get(Month::new(2020, 1)), Some(1.5));
        assert_eq!(back[1].kind, IndicatorKind::Binary);
    }
}
