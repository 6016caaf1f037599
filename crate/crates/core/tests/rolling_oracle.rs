mod common;

use chrono::NaiveDate;
use common::oracle;
use fearnet::rolling::{cumulative_ranking, default_buckets, ratio_series, rolling_connectedness, Bucket, CrisisPeriod, RollingConfig};
use fearnet::synthetic::trading_days;
use fearnet::vol_index::{PanelSet, VolPanel};
use fearnet::Flavor;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn noise_panels(t: usize, n: usize, seed: u64) -> PanelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dates = trading_days(NaiveDate::from_ymd_opt(2007, 6, 1).unwrap(), t);
    let names: Vec<String> = (0..n).map(|j| format!("S{j}")).collect();
    let mut mk = |flavor| {
        let values = DMatrix::from_fn(t, n, |_, _| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (3.0 + 0.1 * z).exp()
        });
        VolPanel::new(dates.clone(), names.clone(), values, flavor).unwrap()
    };
    PanelSet { aggregate: mk(Flavor::Aggregate), positive: mk(Flavor::Positive), negative: mk(Flavor::Negative), gaps: vec![] }
}

fn rows(m: &DMatrix<f64>, start: usize, len: usize) -> oracle::Mat {
    (start..start + len).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[test]
fn rolling_totals_replicate_straight_line_pipeline() {
    let panels = noise_panels(320, 2, 1);
    let cfg = RollingConfig { step: 10, ..RollingConfig::default() };
    let r = rolling_connectedness(&panels, &cfg).unwrap();
    assert_eq!(r.len(), 13);
    for (i, date) in r.dates.iter().enumerate() {
        let end = panels.aggregate.dates.iter().position(|d| d == date).unwrap();
        for f in Flavor::ALL {
            let want = oracle::window_total(&rows(&panels.get(f).values, end + 1 - 200, 200), 4, 12, true);
            assert!((r.total(f)[i] - want).abs() < 1e-8);
        }
    }
    // independent noise: only small-sample spillovers remain
    let mean = r.total(Flavor::Aggregate).iter().sum::<f64>() / r.len() as f64;
    assert!(mean > 0.0 && mean < 10.0, "{mean}");
}

#[test]
fn ratio_matches_elementwise_division() {
    let panels = noise_panels(260, 3, 2);
    let r = rolling_connectedness(&panels, &RollingConfig { window: 200, p: 2, step: 5, ..Default::default() }).unwrap();
    let ratio = ratio_series(&r);
    for (i, got) in ratio.iter().enumerate() {
        assert_eq!(*got, Some(r.total(Flavor::Negative)[i] / r.total(Flavor::Positive)[i]));
    }
}

#[test]
fn ranking_matches_clipped_sums() {
    let panels = noise_panels(450, 3, 3);
    let r = rolling_connectedness(&panels, &RollingConfig { window: 100, p: 2, horizon: 12, log_transform: true, step: 1 }).unwrap();
    let buckets = default_buckets(&r.dates, CrisisPeriod::default());
    let report = cumulative_ranking(&r, &buckets, Flavor::Negative).unwrap();
    let nets = r.net(Flavor::Negative);
    for b in &report.buckets {
        for j in 0..3 {
            let mut t = 0.0;
            let mut rcv = 0.0;
            let mut net = 0.0;
            for (i, d) in r.dates.iter().enumerate() {
                if *d >= b.bucket.start && *d <= b.bucket.end {
                    let v = nets[(i, j)];
                    if v > 0.0 {
                        t += v;
                    } else {
                        rcv += v;
                    }
                    net += v;
                }
            }
            assert_eq!(b.transmit[j], t);
            assert_eq!(b.receive[j], rcv);
            assert!(b.transmit[j] >= 0.0 && b.receive[j] <= 0.0);
            assert!((b.transmit[j] - b.receive[j].abs() - net).abs() < 1e-9);
        }
        let top = (0..3).max_by(|&a, &c| b.transmit[a].total_cmp(&b.transmit[c]).then(c.cmp(&a))).unwrap();
        assert_eq!(b.top_transmitter, report.names[top]);
    }
    let labels: Vec<_> = report.buckets.iter().map(|b| b.bucket.label.as_str()).collect();
    assert!(labels.contains(&"crisis") && labels.contains(&"full"));
    let outside = [Bucket::new("later", NaiveDate::from_ymd_opt(2030, 1, 1).unwrap(), NaiveDate::from_ymd_opt(2030, 12, 31).unwrap())];
    assert!(cumulative_ranking(&r, &outside, Flavor::Negative).is_err());
}
