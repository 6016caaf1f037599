//! Straight-line reference implementations for the integration and acceptance
//! tests. Plain loops over `Vec<Vec<f64>>`, no shared code with the library.
#![allow(dead_code, clippy::needless_range_loop)]

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for i in 0..n {
        m[i][i] = 1.0;
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    let mut out = zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            let mut s = 0.0;
            for l in 0..k {
                s += a[i][l] * b[l][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn transpose(a: &Mat) -> Mat {
    let mut out = zeros(a[0].len(), a.len());
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[j][i] = *v;
        }
    }
    out
}

/// Solves `A X = B` by Gauss-Jordan elimination with partial pivoting.
pub fn solve(mut a: Mat, mut b: Mat) -> Mat {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-300, "singular system");
        for j in 0..n {
            a[col][j] /= d;
        }
        for j in 0..b[0].len() {
            b[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                    }
                    for j in 0..b[0].len() {
                        b[i][j] -= f * b[col][j];
                    }
                }
            }
        }
    }
    b
}

pub fn inverse(a: &Mat) -> Mat {
    solve(a.clone(), identity(a.len()))
}

/// `Ψ_0 .. Ψ_H` by the recursion `Ψ_h = Σ_k Φ_k Ψ_{h−k}`.
pub fn ma_psi(phi: &[Mat], horizon: usize) -> Vec<Mat> {
    let n = phi[0].len();
    let mut psi = vec![identity(n)];
    for h in 1..=horizon {
        let mut acc = zeros(n, n);
        for k in 1..=h.min(phi.len()) {
            let term = matmul(&phi[k - 1], &psi[h - k]);
            for i in 0..n {
                for j in 0..n {
                    acc[i][j] += term[i][j];
                }
            }
        }
        psi.push(acc);
    }
    psi
}

/// Generalized decomposition, raw and row-normalized.
pub fn gfevd(phi: &[Mat], sigma: &Mat, horizon: usize) -> (Mat, Mat) {
    let n = sigma.len();
    let psi = ma_psi(phi, horizon);
    let mut raw = zeros(n, n);
    for j in 0..n {
        let mut den = 0.0;
        for p in &psi {
            // e_jᵀ Ψ Σ Ψᵀ e_j
            for a in 0..n {
                for b in 0..n {
                    den += p[j][a] * sigma[a][b] * p[j][b];
                }
            }
        }
        for k in 0..n {
            let mut num = 0.0;
            for p in &psi {
                // e_jᵀ Ψ Σ e_k
                let mut v = 0.0;
                for a in 0..n {
                    v += p[j][a] * sigma[a][k];
                }
                num += v * v;
            }
            raw[j][k] = num / sigma[k][k] / den;
        }
    }
    let mut norm = raw.clone();
    for row in &mut norm {
        let s: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= s;
        }
    }
    (raw, norm)
}

pub struct Summary {
    pub total: f64,
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub net: Vec<f64>,
}

pub fn summary(theta: &Mat) -> Summary {
    let n = theta.len();
    let mut from = vec![0.0; n];
    let mut to = vec![0.0; n];
    let mut off = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                from[j] += 100.0 * theta[j][k];
                to[k] += 100.0 * theta[j][k];
                off += theta[j][k];
            }
        }
    }
    let net = (0..n).map(|j| to[j] - from[j]).collect();
    Summary { total: 100.0 * off / n as f64, from, to, net }
}

/// VAR(p) with intercept by normal equations; `data` is `T` rows of `N` values.
/// Returns `(Φ_1..Φ_p, Σ)`.
pub fn fit_var(data: &Mat, p: usize, log: bool) -> (Vec<Mat>, Mat) {
    let y_all: Mat = if log { data.iter().map(|r| r.iter().map(|v| v.ln()).collect()).collect() } else { data.clone() };
    let t = y_all.len();
    let n = y_all[0].len();
    let k = 1 + n * p;
    let mut zz = zeros(k, k);
    let mut zy = zeros(k, n);
    let mut rows = Vec::new();
    for s in p..t {
        let mut z = vec![1.0];
        for lag in 1..=p {
            z.extend_from_slice(&y_all[s - lag]);
        }
        for a in 0..k {
            for b in 0..k {
                zz[a][b] += z[a] * z[b];
            }
            for b in 0..n {
                zy[a][b] += z[a] * y_all[s][b];
            }
        }
        rows.push((z, y_all[s].clone()));
    }
    let beta = solve(zz, zy);
    let t_eff = (t - p) as f64;
    let mut sigma = zeros(n, n);
    for (z, y) in &rows {
        let e: Vec<f64> = (0..n).map(|j| y[j] - (0..k).map(|a| z[a] * beta[a][j]).sum::<f64>()).collect();
        for a in 0..n {
            for b in 0..n {
                sigma[a][b] += e[a] * e[b] / t_eff;
            }
        }
    }
    let phi = (0..p)
        .map(|lag| {
            let mut m = zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[i][j] = beta[1 + lag * n + j][i];
                }
            }
            m
        })
        .collect();
    (phi, sigma)
}

/// Static total connectedness of a window, straight through.
pub fn window_total(data: &Mat, p: usize, horizon: usize, log: bool) -> f64 {
    let (phi, sigma) = fit_var(data, p, log);
    summary(&gfevd(&phi, &sigma, horizon).1).total
}

/// OLS coefficients and the Newey-West covariance by direct double summation
/// over all observation pairs within `lags` of each other.
pub fn newey_west(x: &Mat, y: &[f64], lags: usize) -> (Vec<f64>, Mat) {
    let n = x.len();
    let k = x[0].len();
    let xt = transpose(x);
    let xtx = matmul(&xt, x);
    let xty = matmul(&xt, &y.iter().map(|v| vec![*v]).collect());
    let beta: Vec<f64> = solve(xtx.clone(), xty).into_iter().map(|r| r[0]).collect();
    let e: Vec<f64> = (0..n).map(|i| y[i] - (0..k).map(|j| x[i][j] * beta[j]).sum::<f64>()).collect();
    let mut s = zeros(k, k);
    for t in 0..n {
        let lo = t.saturating_sub(lags);
        let hi = (t + lags).min(n - 1);
        for u in lo..=hi {
            let l = t.abs_diff(u);
            let w = 1.0 - l as f64 / (lags as f64 + 1.0);
            for a in 0..k {
                for b in 0..k {
                    s[a][b] += w * e[t] * e[u] * x[t][a] * x[u][b];
                }
            }
        }
    }
    let bread = inverse(&xtx);
    (beta, matmul(&matmul(&bread, &s), &bread))
}

/// One expiry of a chain quoted on every strike, for the volatility-index oracle.
pub struct ExpiryQuotes {
    pub strikes: Vec<f64>,
    pub calls: Vec<f64>,
    pub puts: Vec<f64>,
    pub rate: f64,
    pub days: i64,
}

pub struct ExpiryVariances {
    pub all: f64,
    pub calls: f64,
    pub puts: f64,
    /// Explicit `K₀` double-count term: `σ²₊ + σ²₋ − σ²`.
    pub k0_term: f64,
}

pub fn expiry_variances(q: &ExpiryQuotes) -> ExpiryVariances {
    let t = q.days as f64 / 365.0;
    let n = q.strikes.len();
    let mut best = 0;
    for i in 0..n {
        if (q.calls[i] - q.puts[i]).abs() < (q.calls[best] - q.puts[best]).abs() {
            best = i;
        }
    }
    let f = q.strikes[best] + (q.rate * t).exp() * (q.calls[best] - q.puts[best]);
    let i0 = (0..n).rfind(|&i| q.strikes[i] <= f).unwrap();
    let k0 = q.strikes[i0];
    let gap = |i: usize| {
        if i == 0 {
            q.strikes[1] - q.strikes[0]
        } else if i == n - 1 {
            q.strikes[n - 1] - q.strikes[n - 2]
        } else {
            (q.strikes[i + 1] - q.strikes[i - 1]) / 2.0
        }
    };
    let scale = 2.0 * (q.rate * t).exp() / t;
    let adj = (f / k0 - 1.0).powi(2) / t;
    let (mut all, mut calls, mut puts) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let w = gap(i) / (q.strikes[i] * q.strikes[i]);
        if i < i0 {
            all += w * q.puts[i];
            puts += w * q.puts[i];
        } else if i > i0 {
            all += w * q.calls[i];
            calls += w * q.calls[i];
        } else {
            all += w * (q.calls[i] + q.puts[i]) / 2.0;
            calls += w * q.calls[i];
            puts += w * q.puts[i];
        }
    }
    let k0_term = scale * gap(i0) / (k0 * k0) * (q.calls[i0] + q.puts[i0]) / 2.0 - adj;
    ExpiryVariances { all: scale * all - adj, calls: scale * calls - adj, puts: scale * puts - adj, k0_term }
}

/// 30-day interpolation weights on annualized variances, `(w1, w2)`.
pub fn weights(n1: i64, n2: i64) -> (f64, f64) {
    let (t1, t2) = (n1 as f64 / 365.0, n2 as f64 / 365.0);
    let span = (n2 - n1) as f64;
    (365.0 / 30.0 * t1 * (n2 - 30) as f64 / span, 365.0 / 30.0 * t2 * (30 - n1) as f64 / span)
}
