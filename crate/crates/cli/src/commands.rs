use std::path::Path;

use fearnet::connectedness::{afc, gfevd, summarize};
use fearnet::market_data::{
    load_indicators, load_market_caps, load_option_chains, load_rate_curves, write_indicators, write_option_chains,
    write_rate_curves, RateBook,
};
use fearnet::predictive::{align_monthly, run_suite, suite_specs, write_suite_long, write_suite_table, Predictors, SuiteCell};
use fearnet::rolling::{cumulative_ranking, default_buckets, quarterly_index, rolling_connectedness, RollingConfig};
use fearnet::synthetic::{generate_fixture, FixtureSpec};
use fearnet::var_engine::fit_var;
use fearnet::vol_index::{build_panels, sector_index, PanelSet, VolPanel};
use fearnet::Flavor;
use serde::Serialize;

use crate::config::{Loaded, PathsConfig, RunConfig, SuiteConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fingerprint, OutputDir};

fn panel_file(flavor: Flavor) -> String {
    format!("panel_{}.csv", flavor.label())
}

fn csv_rows<W: std::io::Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> fearnet::Result<()> {
    let map = |e| fearnet::Error::Csv { path: "<output>".into(), source: e };
    let mut w = csv::Writer::from_writer(w);
    w.write_record(header).map_err(map)?;
    for row in rows {
        w.write_record(&row).map_err(map)?;
    }
    w.flush().map_err(|e| fearnet::Error::Io { path: "<output>".into(), source: e })
}

#[derive(Serialize)]
struct FixtureParams<'a> {
    seed: u64,
    days: usize,
    names: &'a [String],
}

/// Writes a synthetic input set and a config file pointing at it.
pub fn gen_fixture(out_dir: &Path, seed: u64, days: usize, names: Vec<String>) -> CliResult<Vec<std::path::PathBuf>> {
    let spec = FixtureSpec { names, n_days: days, seed, ..FixtureSpec::default() };
    let hash = fingerprint(&FixtureParams { seed, days, names: &spec.names });
    let fx = generate_fixture(&spec)?;
    let mut out = OutputDir::create(out_dir, &hash)?;
    out.write("chains.csv", |w| write_option_chains(w, &fx.chains))?;
    out.write("rates.csv", |w| write_rate_curves(w, &fx.rates))?;
    out.write("caps.csv", |w| fx.caps.write_csv(w))?;
    out.write("indicators.csv", |w| write_indicators(w, &fx.indicators))?;

    let mut config = RunConfig {
        paths: PathsConfig { rates: Some("rates.csv".into()), ..PathsConfig::default() },
        ..RunConfig::default()
    };
    config.predict.suites = Some(vec![
        SuiteConfig { name: "macro".into(), targets: vec!["ADS".into(), "NBER".into()] },
        SuiteConfig { name: "uncertainty".into(), targets: vec!["EPU".into()] },
    ]);
    let text = config.to_toml();
    out.write("fearnet.toml", |w| {
        w.extend_from_slice(text.as_bytes());
        Ok(())
    })?;
    Ok(out.written().to_vec())
}

pub fn build_indexes(cfg: &Loaded, out_dir: &Path) -> CliResult<Vec<std::path::PathBuf>> {
    let c = &cfg.config;
    let chains_path = cfg.existing("paths.chains", &c.paths.chains)?;
    let caps_path = cfg.existing("paths.caps", &c.paths.caps)?;
    let rates = match &c.paths.rates {
        Some(r) => load_rate_curves(&cfg.existing("paths.rates", r)?)?,
        None => RateBook::default(),
    };
    let caps = load_market_caps(&caps_path)?;
    let (chains, drops) = load_option_chains(&chains_path, &c.chain_schema)?;
    let set = build_panels(&chains, &rates, &c.vol)?;

    let weighted: Vec<Vec<f64>> = Flavor::ALL.iter().map(|f| sector_index(set.get(*f), &caps)).collect::<fearnet::Result<_>>()?;
    let mut out = OutputDir::create(out_dir, &cfg.hash())?;
    for f in Flavor::ALL {
        out.write(&panel_file(f), |w| set.get(f).write_csv(w))?;
    }
    let dates = &set.aggregate.dates;
    out.write("wvix.csv", |w| {
        csv_rows(
            w,
            &["date", "WVIX", "WVIX_pos", "WVIX_neg"],
            (0..dates.len()).map(|i| {
                vec![dates[i].to_string(), format!("{:.6}", weighted[0][i]), format!("{:.6}", weighted[1][i]), format!("{:.6}", weighted[2][i])]
            }),
        )
    })?;
    out.write("gap_report.csv", |w| {
        csv_rows(
            w,
            &["name", "date", "flavor", "action", "reason"],
            set.gaps.iter().map(|g| {
                vec![
                    g.name.clone(),
                    g.date.to_string(),
                    g.flavor.label().to_string(),
                    if g.filled { "carried_forward" } else { "trimmed" }.to_string(),
                    g.reason.clone(),
                ]
            }),
        )
    })?;
    out.write("drop_report.csv", |w| {
        let mut rows = vec![vec!["input_rows".to_string(), drops.input_rows.to_string()], vec!["kept_rows".to_string(), drops.kept_rows.to_string()]];
        rows.extend(drops.by_reason.iter().map(|(r, n)| vec![format!("{r:?}"), n.to_string()]));
        csv_rows(w, &["item", "count"], rows)
    })?;
    Ok(out.written().to_vec())
}

fn load_panels(out_dir: &Path) -> CliResult<PanelSet> {
    let load = |f: Flavor| -> CliResult<VolPanel> {
        let path = out_dir.join(panel_file(f));
        if !path.exists() {
            return Err(CliError::MissingPath { key: "panel (run build-indexes first)", path });
        }
        Ok(VolPanel::load(&path, f)?)
    };
    Ok(PanelSet { aggregate: load(Flavor::Aggregate)?, positive: load(Flavor::Positive)?, negative: load(Flavor::Negative)?, gaps: vec![] })
}

pub fn connectedness_static(cfg: &Loaded, out_dir: &Path) -> CliResult<Vec<std::path::PathBuf>> {
    let panels = load_panels(out_dir)?;
    let r: RollingConfig = cfg.config.rolling.rolling();
    let mut summaries = Vec::new();
    let mut stability = Vec::new();
    for f in Flavor::ALL {
        let panel = panels.get(f);
        let model = fit_var(&panel.values, r.p, r.log_transform)?;
        let s = model.stability();
        if !s.stable {
            eprintln!("warning: {} VAR is not stable (spectral radius {:.4})", f.label(), s.radius);
        }
        stability.push(vec![f.label().to_string(), model.t_eff.to_string(), format!("{:.6}", s.radius), s.stable.to_string()]);
        summaries.push(summarize(&gfevd(&model, r.horizon, &panel.names)?, f));
    }
    let report = afc(&summaries[1], &summaries[2])?;
    let mut out = OutputDir::create(out_dir, &cfg.hash())?;
    for s in &summaries {
        out.write(&format!("connectedness_{}.csv", s.flavor.label()), |w| s.write_table(w, Some(2)))?;
        out.write(&format!("connectedness_{}_full.csv", s.flavor.label()), |w| s.write_table(w, None))?;
    }
    out.write("afc.csv", |w| report.write_csv(w))?;
    out.write("static_report.csv", |w| csv_rows(w, &["flavor", "t_eff", "spectral_radius", "stable"], stability))?;
    Ok(out.written().to_vec())
}

pub fn connectedness_rolling(cfg: &Loaded, out_dir: &Path) -> CliResult<Vec<std::path::PathBuf>> {
    let panels = load_panels(out_dir)?;
    let section = &cfg.config.rolling;
    let series = rolling_connectedness(&panels, &section.rolling())?;
    if series.is_empty() {
        return Err(CliError::Core(fearnet::Error::SampleTooShort("every rolling window failed; see the window report".into())));
    }
    let buckets = match &section.buckets {
        Some(b) => b.clone(),
        None => default_buckets(&series.dates, section.crisis()),
    };
    let rankings = Flavor::ALL
        .iter()
        .map(|f| cumulative_ranking(&series, &buckets, *f))
        .collect::<fearnet::Result<Vec<_>>>()?;
    let mut out = OutputDir::create(out_dir, &cfg.hash())?;
    out.write("rolling_totals.csv", |w| series.write_totals_csv(w))?;
    for f in Flavor::ALL {
        out.write(&format!("rolling_net_{}.csv", f.label()), |w| series.write_nets_csv(w, f))?;
    }
    out.write("rolling_windows.csv", |w| series.write_window_report(w))?;
    for r in &rankings {
        out.write(&format!("ranking_{}.csv", r.flavor.label()), |w| r.write_csv(w))?;
    }
    Ok(out.written().to_vec())
}

pub fn predict(cfg: &Loaded, out_dir: &Path) -> CliResult<Vec<std::path::PathBuf>> {
    let c = &cfg.config;
    let indicators_path = cfg.existing("paths.indicators", &c.paths.indicators)?;
    let panels = load_panels(out_dir)?;
    let monthly = quarterly_index(&panels, &c.quarterly)?;
    let indicators = load_indicators(&indicators_path)?;
    let design = align_monthly(&monthly, &indicators)?;
    let hac = c.predict.hac_lags.resolve()?;
    let suites: Vec<SuiteConfig> = match &c.predict.suites {
        Some(s) => s.clone(),
        None => vec![SuiteConfig { name: "all".into(), targets: indicators.iter().map(|i| i.name.clone()).collect() }],
    };
    let mut results: Vec<(String, Vec<SuiteCell>)> = Vec::new();
    for suite in &suites {
        let mut specs = suite_specs(&design, &suite.targets, &c.predict.horizons, hac)?;
        for s in &mut specs {
            s.endo_lags = c.predict.endo_lags;
        }
        results.push((suite.name.clone(), run_suite(&specs, &design)));
    }

    let mut out = OutputDir::create(out_dir, &cfg.hash())?;
    out.write("monthly_connectedness.csv", |w| monthly.write_csv(w))?;
    out.write("monthly_skipped.csv", |w| {
        csv_rows(w, &["month", "reason"], monthly.skipped.iter().map(|(m, r)| vec![m.to_string(), r.clone()]))
    })?;
    out.write("predict_index.csv", |w| {
        let rows = results.iter().flat_map(|(name, cells)| {
            cells.iter().map(move |cell| {
                vec![
                    name.clone(),
                    cell.spec.target.clone(),
                    cell.spec.horizon.to_string(),
                    cell.spec.predictors.label().to_string(),
                    match &cell.outcome {
                        Ok(r) if r.degenerate => "degenerate".to_string(),
                        Ok(_) => "ok".to_string(),
                        Err(e) => format!("error:{}", e.kind()),
                    },
                ]
            })
        });
        csv_rows(w, &["suite", "target", "horizon", "predictors", "status"], rows)
    })?;
    for (name, cells) in &results {
        for p in Predictors::ALL {
            out.write(&format!("predict_{name}_{}.csv", p.label()), |w| write_suite_table(w, cells, p))?;
        }
        out.write(&format!("predict_{name}_long.csv"), |w| write_suite_long(w, cells))?;
    }
    let failed = results.iter().flat_map(|r| &r.1).filter(|c| c.outcome.is_err()).count();
    if failed > 0 {
        eprintln!("warning: {failed} regression cell(s) failed; see predict_index.csv");
    }
    eprintln!("aligned {} months ({} dropped for indicator gaps)", design.months.len(), design.dropped);
    Ok(out.written().to_vec())
}
