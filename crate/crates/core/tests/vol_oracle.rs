mod common;

use chrono::NaiveDate;
use common::oracle;
use fearnet::market_data::{read_option_chains, write_option_chains, ChainSchema, OptionChainDay, RateBook, RateCurveDay, Right};
use fearnet::synthetic::{flat_chain, generate_fixture, FixtureSpec, SyntheticChainSpec};
use fearnet::vol_index::{build_panels, sector_index, DaySlices, Side, VolIndexConfig};
use fearnet::Flavor;

fn date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 3, 1).unwrap()
}

fn chain(step: f64, rate: f64) -> OptionChainDay {
    let mut spec = SyntheticChainSpec::flat(0.2, rate, vec![23, 37], 50.0, 150.0, step);
    // keep every strike, even where the model price underflows
    spec.min_price = f64::NEG_INFINITY;
    flat_chain("SYN", date(), 100.0, &spec)
}

fn oracle_quotes(chain: &OptionChainDay, rate: f64) -> Vec<oracle::ExpiryQuotes> {
    chain
        .slices
        .iter()
        .map(|s| {
            let calls: Vec<_> = s.quotes_for(Right::Call).collect();
            let puts: Vec<_> = s.quotes_for(Right::Put).collect();
            assert_eq!(calls.len(), puts.len());
            oracle::ExpiryQuotes {
                strikes: calls.iter().map(|q| q.strike).collect(),
                calls: calls.iter().map(|q| q.mid()).collect(),
                puts: puts.iter().map(|q| q.mid()).collect(),
                rate,
                days: s.days_to_expiry(chain.quote_date),
            }
        })
        .collect()
}

fn oracle_indexes(chain: &OptionChainDay, rate: f64) -> (f64, f64, f64, f64) {
    let q = oracle_quotes(chain, rate);
    let (v1, v2) = (oracle::expiry_variances(&q[0]), oracle::expiry_variances(&q[1]));
    let (w1, w2) = oracle::weights(q[0].days, q[1].days);
    let idx = |a: f64, b: f64| 100.0 * (w1 * a + w2 * b).sqrt();
    (
        idx(v1.all, v2.all),
        idx(v1.calls, v2.calls),
        idx(v1.puts, v2.puts),
        1e4 * (w1 * v1.k0_term + w2 * v2.k0_term),
    )
}

#[test]
fn black_scholes_chain_recovers_flat_volatility() {
    let cfg = VolIndexConfig::default();
    let coarse = DaySlices::build(&chain(1.0, 0.0), None, &cfg).unwrap().index(Side::All).unwrap();
    let fine = DaySlices::build(&chain(0.5, 0.0), None, &cfg).unwrap().index(Side::All).unwrap();
    assert!((coarse - 20.0).abs() < 1.0, "{coarse}");
    assert!((fine - 20.0).abs() < (coarse - 20.0).abs(), "{fine} vs {coarse}");
}

#[test]
fn pipeline_matches_straight_line_oracle() {
    for rate in [0.0, 0.03] {
        let c = chain(1.0, rate);
        let curve = RateCurveDay::new(date(), vec![(30, rate)]).unwrap();
        let s = DaySlices::build(&c, Some(&curve), &VolIndexConfig::default()).unwrap();
        let (all, pos, neg, gap) = oracle_indexes(&c, rate);
        assert!((s.index(Side::All).unwrap() - all).abs() < 1e-10);
        assert!((s.index(Side::CallsOnly).unwrap() - pos).abs() < 1e-10);
        assert!((s.index(Side::PutsOnly).unwrap() - neg).abs() < 1e-10);
        assert!((s.decomposition_gap() - gap).abs() < 1e-10);
    }
}

#[test]
fn decomposition_gap_is_the_k0_term() {
    let c = chain(1.0, 0.0);
    let s = DaySlices::build(&c, None, &VolIndexConfig::default()).unwrap();
    let all = s.index(Side::All).unwrap();
    let pos = s.index(Side::CallsOnly).unwrap();
    let neg = s.index(Side::PutsOnly).unwrap();
    let direct = pos * pos + neg * neg - all * all;
    assert!((direct - s.decomposition_gap()).abs() < 1e-8);
    assert!(direct.abs() > 1.0, "the split is not additive: {direct}");
}

#[test]
fn chain_csv_round_trip() {
    let c = chain(5.0, 0.01);
    let mut buf = Vec::new();
    write_option_chains(&mut buf, std::slice::from_ref(&c)).unwrap();
    let (back, report) = read_option_chains(&buf[..], &ChainSchema::default()).unwrap();
    // underflowed quotes have zero bids and are dropped on load
    assert_eq!(report.input_rows, c.n_quotes());
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].n_quotes(), report.kept_rows);
    let kept: Vec<_> = c.slices[0].quotes.iter().filter(|q| q.bid > 0.0).collect();
    let loaded: Vec<_> = back[0].slices[0].quotes.iter().collect();
    assert_eq!(kept.len(), loaded.len());
    for (a, b) in kept.iter().zip(loaded) {
        assert_eq!((a.strike, a.right, a.bid, a.ask), (b.strike, b.right, b.bid, b.ask));
    }
}

#[test]
fn fixture_panels_are_complete_and_positive() {
    let fx = generate_fixture(&FixtureSpec { n_days: 1100, ..FixtureSpec::default() }).unwrap();
    let set = build_panels(&fx.chains, &RateBook::new(fx.rates.clone()), &VolIndexConfig::default()).unwrap();
    for f in Flavor::ALL {
        let p = set.get(f);
        assert_eq!(p.values.shape(), (1100, 3));
        assert!(p.values.iter().all(|v| *v > 0.0 && v.is_finite()));
    }
    // a thin put wing on a short expiry can fail the one-sided strip; those
    // days are carried forward
    assert!(set.gaps.len() * 1000 < 1100 * 3 * 3, "{} gaps", set.gaps.len());
    assert!(set.gaps.iter().all(|g| g.filled));
    let w = sector_index(&set.aggregate, &fx.caps).unwrap();
    assert_eq!(w.len(), 1100);
    for (i, v) in w.iter().enumerate() {
        let row = set.aggregate.values.row(i);
        assert!(*v >= row.min() && *v <= row.max());
    }
}
