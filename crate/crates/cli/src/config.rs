//! Run configuration: a TOML file whose keys are listed in `--help`.
//! Unknown keys are rejected. Relative paths resolve against the directory
//! of the config file (or the working directory when none is given).

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use fearnet::market_data::ChainSchema;
use fearnet::predictive::HacLags;
use fearnet::rolling::{Bucket, CrisisPeriod, QuarterlyConfig, RollingConfig};
use fearnet::vol_index::VolIndexConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CONFIG_KEYS: &str = "\
CONFIGURATION KEYS (TOML file given with --config; unknown keys are errors)

[paths]                  relative to the config file's directory
  chains                 option chain CSV                      \"chains.csv\"
  rates                  rate curve CSV (date,tenor_days,rate); omitted = zero rates
  caps                   market caps CSV (name,avg_mktcap)     \"caps.csv\"
  indicators             monthly indicators CSV (month,...)    \"indicators.csv\"
  output                 output directory (--output overrides)  \"output\"

[chain_schema]           column names of the chain file
  date expiry strike right bid ask underlier                  same as the key
  default_underlier      name used when the underlier column is absent

[vol]
  min_days_to_expiry     expiries closer than this are skipped  7
  leading_gap            \"trim\" or \"error\"                   \"trim\"

[rolling]
  window                 trading days per window (--window)      200
  p                      VAR order (--lags)                      4
  horizon                forecast horizon in days (--horizon)    12
  log_transform          fit on log index levels                 true
  step                   days between windows (--step)           1
  crisis_start           start of the crisis bucket             \"2007-12-01\"
  crisis_end             end of the crisis bucket               \"2009-06-30\"
  buckets                [{label, start, end}] replacing the default
                         yearly / two-year / pre-crisis / crisis / post-crisis / full buckets

[quarterly]              monthly series of quarterly connectedness
  window                 trading days per window                 60
  p                      VAR order                               4
  horizon                forecast horizon in days                12
  log_transform          fit on log index levels                 true

[predict]
  hac_lags               \"horizon\" or a fixed lag (--hac-lags)  \"horizon\"
  horizons               forecast horizons in months             [1, ..., 12]
  endo_lags              own lags of the target                  12
  suites                 [{name, targets}]; omitted = one suite \"all\" with every indicator
";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub chains: String,
    pub rates: Option<String>,
    pub caps: String,
    pub indicators: String,
    pub output: String,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            chains: "chains.csv".into(),
            rates: None,
            caps: "caps.csv".into(),
            indicators: "indicators.csv".into(),
            output: "output".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RollingSection {
    pub window: usize,
    pub p: usize,
    pub horizon: usize,
    pub log_transform: bool,
    pub step: usize,
    pub crisis_start: NaiveDate,
    pub crisis_end: NaiveDate,
    pub buckets: Option<Vec<Bucket>>,
}

impl Default for RollingSection {
    fn default() -> Self {
        let r = RollingConfig::default();
        let c = CrisisPeriod::default();
        RollingSection {
            window: r.window,
            p: r.p,
            horizon: r.horizon,
            log_transform: r.log_transform,
            step: r.step,
            crisis_start: c.start,
            crisis_end: c.end,
            buckets: None,
        }
    }
}

impl RollingSection {
    pub fn rolling(&self) -> RollingConfig {
        RollingConfig { window: self.window, p: self.p, horizon: self.horizon, log_transform: self.log_transform, step: self.step }
    }

    pub fn crisis(&self) -> CrisisPeriod {
        CrisisPeriod { start: self.crisis_start, end: self.crisis_end }
    }
}

/// `"horizon"` or a fixed non-negative lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HacSetting {
    Fixed(usize),
    Rule(String),
}

impl HacSetting {
    pub fn resolve(&self) -> CliResult<HacLags> {
        match self {
            HacSetting::Fixed(l) => Ok(HacLags::Fixed(*l)),
            HacSetting::Rule(r) if r == "horizon" => Ok(HacLags::Horizon),
            HacSetting::Rule(r) => Err(CliError::Invalid(format!("predict.hac_lags must be \"horizon\" or an integer, got {r:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: String,
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictConfig {
    pub hac_lags: HacSetting,
    pub horizons: Vec<usize>,
    pub endo_lags: usize,
    pub suites: Option<Vec<SuiteConfig>>,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig { hac_lags: HacSetting::Rule("horizon".into()), horizons: (1..=12).collect(), endo_lags: 12, suites: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: PathsConfig,
    pub chain_schema: ChainSchema,
    pub vol: VolIndexConfig,
    pub rolling: RollingSection,
    pub quarterly: QuarterlyConfig,
    pub predict: PredictConfig,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config { path: origin.to_path_buf(), message: e.message().to_string() })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }

    /// Range checks that do not depend on the data.
    pub fn validate(&self) -> CliResult<()> {
        let r = &self.rolling;
        if r.window == 0 || r.p == 0 || r.horizon == 0 || r.step == 0 {
            return Err(CliError::Invalid("rolling.window, p, horizon and step must be positive".into()));
        }
        if r.crisis_start > r.crisis_end {
            return Err(CliError::Invalid("rolling.crisis_start is after rolling.crisis_end".into()));
        }
        let q = &self.quarterly;
        if q.window == 0 || q.p == 0 || q.horizon == 0 {
            return Err(CliError::Invalid("quarterly.window, p and horizon must be positive".into()));
        }
        if self.predict.horizons.contains(&0) {
            return Err(CliError::Invalid("predict.horizons must be positive".into()));
        }
        if self.vol.min_days_to_expiry < 1 {
            return Err(CliError::Invalid("vol.min_days_to_expiry must be at least 1".into()));
        }
        self.predict.hac_lags.resolve()?;
        Ok(())
    }
}

/// A configuration together with the directory its relative paths hang off.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Loaded { config: RunConfig::default(), base: PathBuf::from(".") }),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                let config = RunConfig::parse(&text, p)?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                Ok(Loaded { config, base })
            }
        }
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    /// Resolves a path that must already exist.
    pub fn existing(&self, key: &'static str, rel: &str) -> CliResult<PathBuf> {
        let p = self.resolve(rel);
        if p.exists() {
            Ok(p)
        } else {
            Err(CliError::MissingPath { key, path: p })
        }
    }

    /// Fingerprint of everything that can change output contents; the output
    /// location itself is excluded.
    pub fn hash(&self) -> String {
        let mut c = self.config.clone();
        c.paths.output.clear();
        crate::output::fingerprint(&c)
    }
}
