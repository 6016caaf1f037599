//! Rolling-window connectedness, the put/call connectedness ratio, cumulative
//! transmitter/receiver rankings and the monthly series of quarterly indexes.
//!
//! Windows are right-aligned: the value stamped at date `t` uses rows
//! `t − window + 1 ..= t`. Windows are independent, so they are computed in
//! parallel and reassembled in date order; serial and parallel runs produce
//! identical bits.

use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectedness::{gfevd, summarize, ConnectednessSummary};
use crate::error::{Error, Result};
use crate::market_data::{csv_reader, Month};
use crate::var_engine::fit_var;
use crate::vol_index::{Flavor, PanelSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RollingConfig {
    pub window: usize,
    pub p: usize,
    pub horizon: usize,
    pub log_transform: bool,
    pub step: usize,
}

impl Default for RollingConfig {
    fn default() -> Self {
        RollingConfig { window: 200, p: 4, horizon: 12, log_transform: true, step: 1 }
    }
}

impl RollingConfig {
    /// Checks the window against the VAR's parameter count for `n` names.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.p == 0 || self.horizon == 0 || self.step == 0 {
            return Err(Error::InvalidArgument("p, horizon and step must be positive".into()));
        }
        let need = n * self.p + self.p + 1;
        if self.window <= need {
            return Err(Error::InvalidArgument(format!(
                "window {} must exceed N·p + p + 1 = {need} for {n} names",
                self.window
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

fn slot(flavor: Flavor) -> usize {
    match flavor {
        Flavor::Aggregate => 0,
        Flavor::Positive => 1,
        Flavor::Negative => 2,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedWindow {
    pub date: NaiveDate,
    pub flavor: Flavor,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollingSeries {
    pub names: Vec<String>,
    /// Window end dates of the computed windows.
    pub dates: Vec<NaiveDate>,
    /// Totals per flavor in `Flavor::ALL` order.
    pub totals: [Vec<f64>; 3],
    /// Per flavor, `windows × names` net connectedness.
    pub nets: [DMatrix<f64>; 3],
    /// `C⁻ / C⁺`, `None` where `C⁺ = 0`.
    pub ratio: Vec<Option<f64>>,
    /// Companion-matrix instability per window and flavor.
    pub unstable: Vec<[bool; 3]>,
    pub skipped: Vec<SkippedWindow>,
}

impl RollingSeries {
    pub fn total(&self, flavor: Flavor) -> &[f64] {
        &self.totals[slot(flavor)]
    }

    pub fn net(&self, flavor: Flavor) -> &DMatrix<f64> {
        &self.nets[slot(flavor)]
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Rolling totals: `date,C,C_pos,C_neg,AFC,ratio`.
    pub fn write_totals_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let map = |e| Error::csv("<output>", e);
        w.write_record(["date", "C", "C_pos", "C_neg", "AFC", "ratio"]).map_err(map)?;
        for (i, date) in self.dates.iter().enumerate() {
            let (c, pos, neg) = (self.totals[0][i], self.totals[1][i], self.totals[2][i]);
            w.write_record([
                date.to_string(),
                c.to_string(),
                pos.to_string(),
                neg.to_string(),
                (pos - neg).to_string(),
                self.ratio[i].map(|r| r.to_string()).unwrap_or_default(),
            ])
            .map_err(map)?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))
    }

    /// Net connectedness of one flavor: `date,<names...>`.
    pub fn write_nets_csv<W: Write>(&self, writer: W, flavor: Flavor) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let map = |e| Error::csv("<output>", e);
        let mut header = vec!["date".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header).map_err(map)?;
        let nets = self.net(flavor);
        for (i, date) in self.dates.iter().enumerate() {
            let mut row = vec![date.to_string()];
            row.extend(nets.row(i).iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(map)?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))
    }

    /// Skipped and unstable windows: `date,status,flavor,detail`.
    pub fn write_window_report<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let map = |e| Error::csv("<output>", e);
        w.write_record(["date", "status", "flavor", "detail"]).map_err(map)?;
        let mut rows: Vec<(NaiveDate, [String; 3])> = self
            .skipped
            .iter()
            .map(|s| (s.date, ["skipped".to_string(), s.flavor.label().to_string(), s.reason.clone()]))
            .collect();
        for (i, flags) in self.unstable.iter().enumerate() {
            for f in Flavor::ALL {
                if flags[slot(f)] {
                    rows.push((self.dates[i], ["unstable".into(), f.label().into(), "companion spectral radius >= 1".into()]));
                }
            }
        }
        rows.sort_by_key(|r| r.0);
        for (date, [status, flavor, detail]) in rows {
            w.write_record([date.to_string(), status, flavor, detail]).map_err(map)?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))
    }
}

struct WindowOutcome {
    summaries: [ConnectednessSummary; 3],
    unstable: [bool; 3],
}

fn check_axes(panels: &PanelSet) -> Result<()> {
    let a = &panels.aggregate;
    for other in [&panels.positive, &panels.negative] {
        if other.dates != a.dates || other.names != a.names {
            return Err(Error::InvalidArgument("panels do not share date and name axes".into()));
        }
    }
    Ok(())
}

/// One window ending at row `end`, for all three flavors.
fn window_at(
    panels: &PanelSet,
    end: usize,
    window: usize,
    p: usize,
    horizon: usize,
    log_transform: bool,
) -> std::result::Result<WindowOutcome, (Flavor, Error)> {
    let start = end + 1 - window;
    let mut summaries = Vec::with_capacity(3);
    let mut unstable = [false; 3];
    for flavor in Flavor::ALL {
        let panel = panels.get(flavor);
        let data = panel.values.rows(start, window).into_owned();
        let model = fit_var(&data, p, log_transform).map_err(|e| (flavor, e))?;
        unstable[slot(flavor)] = !model.stability().stable;
        let table = gfevd(&model, horizon, &panel.names).map_err(|e| (flavor, e))?;
        summaries.push(summarize(&table, flavor));
    }
    let summaries: [ConnectednessSummary; 3] = summaries.try_into().expect("three flavors");
    Ok(WindowOutcome { summaries, unstable })
}

fn run_windows(
    panels: &PanelSet,
    ends: &[usize],
    window: usize,
    p: usize,
    horizon: usize,
    log_transform: bool,
    exec: Execution,
) -> Vec<std::result::Result<WindowOutcome, (Flavor, Error)>> {
    let f = |&end: &usize| window_at(panels, end, window, p, horizon, log_transform);
    match exec {
        Execution::Serial => ends.iter().map(f).collect(),
        Execution::Parallel => ends.par_iter().map(f).collect(),
    }
}

pub fn rolling_connectedness(panels: &PanelSet, cfg: &RollingConfig) -> Result<RollingSeries> {
    rolling_connectedness_with(panels, cfg, Execution::Parallel)
}

pub fn rolling_connectedness_with(panels: &PanelSet, cfg: &RollingConfig, exec: Execution) -> Result<RollingSeries> {
    check_axes(panels)?;
    let base = &panels.aggregate;
    let n = base.n_names();
    cfg.validate(n)?;
    let t = base.n_obs();
    if t < cfg.window {
        return Err(Error::SampleTooShort(format!("window {} exceeds the {t} available observations", cfg.window)));
    }
    let ends: Vec<usize> = (cfg.window - 1..t).step_by(cfg.step).collect();
    let outcomes = run_windows(panels, &ends, cfg.window, cfg.p, cfg.horizon, cfg.log_transform, exec);

    let mut dates = Vec::new();
    let mut totals: [Vec<f64>; 3] = Default::default();
    let mut net_rows: [Vec<f64>; 3] = Default::default();
    let mut unstable = Vec::new();
    let mut skipped = Vec::new();
    for (end, outcome) in ends.iter().zip(outcomes) {
        let date = base.dates[*end];
        match outcome {
            Ok(w) => {
                dates.push(date);
                for (k, s) in w.summaries.iter().enumerate() {
                    totals[k].push(s.total);
                    net_rows[k].extend_from_slice(&s.net);
                }
                unstable.push(w.unstable);
            }
            Err((flavor, e)) => skipped.push(SkippedWindow { date, flavor, reason: e.to_string() }),
        }
    }
    let m = dates.len();
    let nets = net_rows.map(|rows| DMatrix::from_row_slice(m, n, &rows));
    let ratio = ratio_of(&totals[2], &totals[1]);
    Ok(RollingSeries { names: base.names.clone(), dates, totals, nets, ratio, unstable, skipped })
}

fn ratio_of(neg: &[f64], pos: &[f64]) -> Vec<Option<f64>> {
    neg.iter().zip(pos).map(|(n, p)| (*p > 0.0).then(|| n / p)).collect()
}

/// Pointwise `C⁻ / C⁺`; points with `C⁺ = 0` are gaps.
pub fn ratio_series(rolling: &RollingSeries) -> Vec<Option<f64>> {
    ratio_of(rolling.total(Flavor::Negative), rolling.total(Flavor::Positive))
}

/// An inclusive date range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bucket {
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Bucket {
    pub fn new(label: impl Into<String>, start: NaiveDate, end: NaiveDate) -> Self {
        Bucket { label: label.into(), start, end }
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

/// Crisis period used for the default pre/during/post split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrisisPeriod {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Default for CrisisPeriod {
    fn default() -> Self {
        CrisisPeriod {
            start: NaiveDate::from_ymd_opt(2007, 12, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2009, 6, 30).unwrap(),
        }
    }
}

/// Calendar years, consecutive two-year groups, pre/during/post crisis and
/// the full sample; buckets with no dates are omitted.
pub fn default_buckets(dates: &[NaiveDate], crisis: CrisisPeriod) -> Vec<Bucket> {
    let (Some(&first), Some(&last)) = (dates.first(), dates.last()) else {
        return Vec::new();
    };
    let ymd = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).unwrap();
    let mut out = Vec::new();
    for y in first.year()..=last.year() {
        out.push(Bucket::new(y.to_string(), ymd(y, 1, 1), ymd(y, 12, 31)));
    }
    for y in (first.year()..=last.year()).step_by(2) {
        out.push(Bucket::new(format!("{}-{}", y, y + 1), ymd(y, 1, 1), ymd(y + 1, 12, 31)));
    }
    out.push(Bucket::new("pre-crisis", first.min(crisis.start), crisis.start.pred_opt().unwrap()));
    out.push(Bucket::new("crisis", crisis.start, crisis.end));
    out.push(Bucket::new("post-crisis", crisis.end.succ_opt().unwrap(), last.max(crisis.end)));
    out.push(Bucket::new("full", first, last));
    out.retain(|b| dates.iter().any(|d| b.contains(*d)));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucketRanking {
    pub bucket: Bucket,
    pub n_dates: usize,
    /// Per name, sum of positive daily nets.
    pub transmit: Vec<f64>,
    /// Per name, sum of negative daily nets.
    pub receive: Vec<f64>,
    pub top_transmitter: String,
    pub top_receiver: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingReport {
    pub flavor: Flavor,
    pub names: Vec<String>,
    pub buckets: Vec<BucketRanking>,
}

pub fn cumulative_ranking(rolling: &RollingSeries, buckets: &[Bucket], flavor: Flavor) -> Result<RankingReport> {
    let nets = rolling.net(flavor);
    let n = rolling.names.len();
    let mut out = Vec::with_capacity(buckets.len());
    for bucket in buckets {
        let rows: Vec<usize> = (0..rolling.len()).filter(|&i| bucket.contains(rolling.dates[i])).collect();
        if rows.is_empty() {
            return Err(Error::EmptyBucket(format!("{} ({}..{})", bucket.label, bucket.start, bucket.end)));
        }
        let mut transmit = vec![0.0; n];
        let mut receive = vec![0.0; n];
        for &i in &rows {
            for j in 0..n {
                let v = nets[(i, j)];
                transmit[j] += v.max(0.0);
                receive[j] += v.min(0.0);
            }
        }
        // first maximum wins on ties
        let top = |vals: &[f64], better: fn(f64, f64) -> bool| {
            let mut best = 0;
            for j in 1..vals.len() {
                if better(vals[j], vals[best]) {
                    best = j;
                }
            }
            rolling.names[best].clone()
        };
        out.push(BucketRanking {
            bucket: bucket.clone(),
            n_dates: rows.len(),
            top_transmitter: top(&transmit, |a, b| a > b),
            top_receiver: top(&receive, |a, b| a < b),
            transmit,
            receive,
        });
    }
    Ok(RankingReport { flavor, names: rolling.names.clone(), buckets: out })
}

impl RankingReport {
    /// `bucket,start,end,name,T,R`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let map = |e| Error::csv("<output>", e);
        w.write_record(["bucket", "start", "end", "name", "T", "R"]).map_err(map)?;
        for b in &self.buckets {
            for (j, name) in self.names.iter().enumerate() {
                w.write_record([
                    b.bucket.label.clone(),
                    b.bucket.start.to_string(),
                    b.bucket.end.to_string(),
                    name.clone(),
                    b.transmit[j].to_string(),
                    b.receive[j].to_string(),
                ])
                .map_err(map)?;
            }
        }
        w.flush().map_err(|e| Error::io("<output>", e))
    }
}

/// Settings for the quarterly index rolled monthly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuarterlyConfig {
    pub window: usize,
    pub p: usize,
    pub horizon: usize,
    pub log_transform: bool,
}

impl Default for QuarterlyConfig {
    fn default() -> Self {
        QuarterlyConfig { window: 60, p: 4, horizon: 12, log_transform: true }
    }
}

/// Total connectedness per flavor at each month end.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyConnectedness {
    pub months: Vec<Month>,
    pub aggregate: Vec<f64>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub skipped: Vec<(Month, String)>,
}

impl MonthlyConnectedness {
    pub fn len(&self) -> usize {
        self.months.len()
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }

    pub fn get(&self, flavor: Flavor) -> &[f64] {
        match flavor {
            Flavor::Aggregate => &self.aggregate,
            Flavor::Positive => &self.positive,
            Flavor::Negative => &self.negative,
        }
    }

    /// `month,C,C_pos,C_neg`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let map = |e| Error::csv("<output>", e);
        w.write_record(["month", "C", "C_pos", "C_neg"]).map_err(map)?;
        for i in 0..self.len() {
            w.write_record([
                self.months[i].to_string(),
                self.aggregate[i].to_string(),
                self.positive[i].to_string(),
                self.negative[i].to_string(),
            ])
            .map_err(map)?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv_reader(reader);
        let mut out = MonthlyConnectedness {
            months: Vec::new(),
            aggregate: Vec::new(),
            positive: Vec::new(),
            negative: Vec::new(),
            skipped: Vec::new(),
        };
        let headers = rdr.headers().map_err(|e| Error::csv("<input>", e))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["month", "C", "C_pos", "C_neg"] {
            return Err(Error::Schema(format!("expected month,C,C_pos,C_neg, found {}", headers.iter().collect::<Vec<_>>().join(","))));
        }
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::csv("<input>", e))?;
            let num = |i: usize| {
                rec[i].parse::<f64>().map_err(|_| Error::Format(format!("row {}: bad number {:?}", line + 1, &rec[i])))
            };
            out.months.push(rec[0].parse()?);
            out.aggregate.push(num(1)?);
            out.positive.push(num(2)?);
            out.negative.push(num(3)?);
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file).map_err(|e| match e {
            Error::Csv { source, .. } => Error::csv(path, source),
            other => other,
        })
    }
}

/// Row index of the last date in each calendar month.
pub fn month_ends(dates: &[NaiveDate]) -> Vec<(Month, usize)> {
    let mut out: Vec<(Month, usize)> = Vec::new();
    for (i, d) in dates.iter().enumerate() {
        let m = Month::of(*d);
        match out.last_mut() {
            Some(last) if last.0 == m => last.1 = i,
            _ => out.push((m, i)),
        }
    }
    out
}

/// For each month end, total connectedness over the trailing `window` rows.
/// Months with too little history, or whose window fails, are skipped and
/// reported.
pub fn quarterly_index(panels: &PanelSet, cfg: &QuarterlyConfig) -> Result<MonthlyConnectedness> {
    check_axes(panels)?;
    let base = &panels.aggregate;
    let n = base.n_names();
    if n < 2 {
        return Err(Error::InvalidArgument("connectedness needs at least two names".into()));
    }
    RollingConfig { window: cfg.window, p: cfg.p, horizon: cfg.horizon, log_transform: cfg.log_transform, step: 1 }
        .validate(n)?;
    let mut skipped = Vec::new();
    let mut targets = Vec::new();
    for (month, end) in month_ends(&base.dates) {
        if end + 1 < cfg.window {
            skipped.push((month, format!("only {} trading days of history", end + 1)));
        } else {
            targets.push((month, end));
        }
    }
    let ends: Vec<usize> = targets.iter().map(|t| t.1).collect();
    let outcomes = run_windows(panels, &ends, cfg.window, cfg.p, cfg.horizon, cfg.log_transform, Execution::Parallel);
    let mut out = MonthlyConnectedness {
        months: Vec::new(),
        aggregate: Vec::new(),
        positive: Vec::new(),
        negative: Vec::new(),
        skipped: Vec::new(),
    };
    for ((month, _), outcome) in targets.into_iter().zip(outcomes) {
        match outcome {
            Ok(w) => {
                out.months.push(month);
                out.aggregate.push(w.summaries[0].total);
                out.positive.push(w.summaries[1].total);
                out.negative.push(w.summaries[2].total);
            }
            Err((flavor, e)) => skipped.push((month, format!("{flavor}: {e}"))),
        }
    }
    skipped.sort_by_key(|s| s.0);
    out.skipped = skipped;
    Ok(out)
}
