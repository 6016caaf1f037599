//! Asymmetric fear connectedness: implied-volatility indexes split into call
//! and put sides, VAR-based variance decompositions, rolling connectedness and
//! its predictive content for economic indicators.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connectedness;
pub mod error;
pub mod linalg;
pub mod market_data;
pub mod predictive;
pub mod rolling;
pub mod synthetic;
pub mod var_engine;
pub mod vol_index;

pub use connectedness::{afc, gfevd, summarize, AfcReport, ConnectednessSummary, FevdTable};
pub use error::{Error, Result};
pub use market_data::{
    load_indicators, load_market_caps, load_option_chains, load_rate_curves, ChainSchema, IndicatorSeries, MarketCapTable, Month,
    OptionChainDay, OptionQuote, RateBook, RateCurveDay, Right,
};
pub use predictive::{align_monthly, ols_hac, probit_fit, run_suite, DesignPanel, RegressionResult, RegressionSpec};
pub use rolling::{cumulative_ranking, quarterly_index, ratio_series, rolling_connectedness, MonthlyConnectedness, RankingReport, RollingConfig, RollingSeries};
pub use var_engine::{fit_var, is_stable, ma_coefficients, VarModel};
pub use vol_index::{build_panels, Flavor, PanelSet, VolIndexConfig, VolPanel};

// The book chapters double as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/volatility-indexes.md")]
    mod volatility_indexes {}
    #[doc = include_str!("../../../book/src/connectedness.md")]
    mod connectedness {}
    #[doc = include_str!("../../../book/src/rolling.md")]
    mod rolling {}
    #[doc = include_str!("../../../book/src/predictive.md")]
    mod predictive {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
