use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod error;
mod output;

use config::{HacSetting, Loaded, CONFIG_KEYS};
use error::{CliError, CliResult};

/// Fear connectedness pipeline: implied-volatility indexes from option
/// chains, static and rolling connectedness, and predictive regressions.
#[derive(Debug, Parser)]
#[command(name = "fearnet", version, after_long_help = CONFIG_KEYS)]
struct Cli {
    /// TOML configuration file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides paths.output)
    #[arg(long, global = true, value_name = "DIR")]
    output: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Seed for gen-fixture
    #[arg(long, global = true, value_name = "N", default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Static,
    Rolling,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write synthetic Black–Scholes chains, rates, caps, indicators and a config
    GenFixture {
        /// Trading days to simulate
        #[arg(long, default_value_t = 1100)]
        days: usize,
        /// Comma-separated underlier names
        #[arg(long, value_delimiter = ',', default_value = "AAA,BBB,CCC")]
        names: Vec<String>,
    },
    /// Build the aggregate, call-side and put-side index panels
    BuildIndexes,
    /// Connectedness tables (static) or rolling-window series and rankings
    Connectedness {
        #[arg(long, value_enum, default_value_t = Mode::Static)]
        mode: Mode,
        /// Rolling window in trading days (rolling.window)
        #[arg(long)]
        window: Option<usize>,
        /// VAR order (rolling.p)
        #[arg(long)]
        lags: Option<usize>,
        /// Forecast horizon in days (rolling.horizon)
        #[arg(long)]
        horizon: Option<usize>,
        /// Days between window ends (rolling.step)
        #[arg(long)]
        step: Option<usize>,
    },
    /// Predictive regressions of indicators on monthly connectedness
    Predict {
        /// Newey-West lag; "horizon" or an integer (predict.hac_lags)
        #[arg(long)]
        hac_lags: Option<String>,
    },
}

fn run(cli: Cli) -> CliResult<Vec<PathBuf>> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    if let Command::GenFixture { days, names } = cli.command {
        let out = cli.output.unwrap_or_else(|| PathBuf::from("fixture"));
        return commands::gen_fixture(&out, cli.seed, days, names);
    }

    let mut cfg = Loaded::load(cli.config.as_deref())?;
    if let Some(o) = &cli.output {
        cfg.config.paths.output = o.display().to_string();
    }
    match &cli.command {
        Command::Connectedness { window, lags, horizon, step, .. } => {
            let r = &mut cfg.config.rolling;
            r.window = window.unwrap_or(r.window);
            r.p = lags.unwrap_or(r.p);
            r.horizon = horizon.unwrap_or(r.horizon);
            r.step = step.unwrap_or(r.step);
        }
        Command::Predict { hac_lags: Some(h) } => {
            cfg.config.predict.hac_lags = match h.parse::<usize>() {
                Ok(l) => HacSetting::Fixed(l),
                Err(_) => HacSetting::Rule(h.clone()),
            };
        }
        _ => {}
    }
    cfg.config.validate()?;
    let out_dir = match &cli.output {
        Some(o) => o.clone(),
        None => cfg.resolve(&cfg.config.paths.output),
    };
    match cli.command {
        Command::GenFixture { .. } => unreachable!("handled above"),
        Command::BuildIndexes => commands::build_indexes(&cfg, &out_dir),
        Command::Connectedness { mode: Mode::Static, .. } => commands::connectedness_static(&cfg, &out_dir),
        Command::Connectedness { mode: Mode::Rolling, .. } => commands::connectedness_rolling(&cfg, &out_dir),
        Command::Predict { .. } => commands::predict(&cfg, &out_dir),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
