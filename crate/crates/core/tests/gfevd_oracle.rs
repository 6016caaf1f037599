#![allow(clippy::needless_range_loop)]

mod common;

use common::oracle;
use fearnet::connectedness::{gfevd, summarize};
use fearnet::synthetic::simulate_var;
use fearnet::var_engine::{fit_var, VarModel};
use fearnet::Flavor;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_vec(m: &DMatrix<f64>) -> oracle::Mat {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn random_model(n: usize, p: usize, seed: u64) -> VarModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = (0..p)
        .map(|_| DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.4..0.4) / (n * p) as f64))
        .collect();
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let sigma = &a * a.transpose() + DMatrix::identity(n, n) * 0.2;
    VarModel::from_parts(phi, DVector::zeros(n), sigma).unwrap()
}

#[test]
fn gfevd_matches_brute_force() {
    for seed in 0..8 {
        let n = 2 + (seed as usize % 3);
        let p = 1 + (seed as usize % 2);
        let m = random_model(n, p, seed);
        let phi: Vec<_> = m.phi.iter().map(to_vec).collect();
        for h in [1, 5, 12] {
            let t = gfevd(&m, h, &[]).unwrap();
            let (raw, norm) = oracle::gfevd(&phi, &to_vec(&m.sigma), h);
            for j in 0..n {
                for k in 0..n {
                    assert!((t.theta_raw[(j, k)] - raw[j][k]).abs() < 1e-12);
                    assert!((t.theta[(j, k)] - norm[j][k]).abs() < 1e-12);
                }
            }
            let s = summarize(&t, Flavor::Aggregate);
            let o = oracle::summary(&norm);
            assert!((s.total - o.total).abs() < 1e-10);
            for j in 0..n {
                assert!((s.from[j] - o.from[j]).abs() < 1e-10);
                assert!((s.to[j] - o.to[j]).abs() < 1e-10);
                assert!((s.net[j] - o.net[j]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn fitted_var_matches_normal_equations() {
    let truth = random_model(3, 2, 42);
    let data = simulate_var(&truth.phi, &DVector::from_element(3, 0.5), &truth.sigma, 400, 100, 9).unwrap();
    let m = fit_var(&data, 2, false).unwrap();
    let (phi, sigma) = oracle::fit_var(&to_vec(&data), 2, false);
    for (a, b) in m.phi.iter().zip(&phi) {
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[(i, j)] - b[i][j]).abs() < 1e-10);
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            assert!((m.sigma[(i, j)] - sigma[i][j]).abs() < 1e-10);
        }
    }
    let total = summarize(&gfevd(&m, 12, &[]).unwrap(), Flavor::Aggregate).total;
    let positive = data.map(|v| (v * 0.1).exp());
    let lm = fit_var(&positive, 2, true).unwrap();
    let log_total = summarize(&gfevd(&lm, 12, &[]).unwrap(), Flavor::Aggregate).total;
    assert!((total - oracle::window_total(&to_vec(&data), 2, 12, false)).abs() < 1e-8);
    assert!((log_total - oracle::window_total(&to_vec(&positive), 2, 12, true)).abs() < 1e-8);
}
