//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use voting_bounds::data::LabeledDataset;
use voting_bounds::stumps::{Orientation, Stump};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive weights that are multiples of 2^-20 and sum to exactly 1, so
/// every partial sum is exact in floating point.
pub fn dyadic_weights(n: usize, g: &mut impl Rng) -> Vec<f64> {
    const SCALE: u64 = 1 << 20;
    let cap = SCALE / n as u64;
    let mut ks: Vec<u64> = (0..n - 1).map(|_| g.random_range(1..=cap)).collect();
    let used: u64 = ks.iter().sum();
    ks.push(SCALE - used);
    ks.iter().map(|&k| k as f64 / SCALE as f64).collect()
}

/// Weighted error of a stump by direct summation.
pub fn stump_error(s: &Stump, ds: &LabeledDataset, w: &[f64]) -> f64 {
    (0..ds.len())
        .filter(|&i| s.eval(ds.row(i)) != ds.label(i))
        .map(|i| w[i])
        .sum()
}

/// Every threshold (sentinels and midpoints between distinct values) and
/// orientation, scored directly; returns the canonically smallest minimizer.
pub fn best_stump_by_enumeration(ds: &LabeledDataset, w: &[f64]) -> (Stump, f64) {
    let mut cands = Vec::new();
    for j in 0..ds.dim() {
        let mut vals: Vec<f64> = (0..ds.len()).map(|i| ds.value(i, j)).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        let mut thr = vec![f64::NEG_INFINITY];
        thr.extend(vals.windows(2).map(|p| (p[0] + p[1]) / 2.0));
        thr.push(f64::INFINITY);
        for t in thr {
            for o in [Orientation::Le, Orientation::Ge] {
                cands.push(Stump::new(j, t, o));
            }
        }
    }
    let scored: Vec<(Stump, f64)> = cands
        .into_iter()
        .map(|s| (s, stump_error(&s, ds, w)))
        .collect();
    let min = scored.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    scored
        .into_iter()
        .filter(|c| c.1 == min)
        .min_by(|a, b| a.0.canonical_cmp(&b.0))
        .unwrap()
}

/// Fewest leading coefficients (by decreasing magnitude) whose removal leaves
/// at most `big_delta`, summing each remainder afresh.
pub fn dimension_by_scan(weights: &[f64], big_delta: f64) -> usize {
    let mut a: Vec<f64> = weights.iter().map(|w| w.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    (0..=a.len())
        .find(|&d| a[d..].iter().sum::<f64>() <= big_delta)
        .unwrap()
}

/// `eps_n` evaluated on a uniform grid of 10^4 + 1 values of Delta together
/// with the remainders themselves (where the minimum is attained).
pub fn eps_n_by_grid(weights: &[f64], delta: f64, alpha: f64, n: usize) -> f64 {
    let mut a: Vec<f64> = weights.iter().map(|w| w.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    let mut grid: Vec<f64> = (0..=10_000).map(|j| j as f64 / 10_000.0).collect();
    grid.extend(
        (0..=a.len())
            .map(|d| a[d..].iter().sum::<f64>())
            .filter(|&t| t <= 1.0),
    );
    let nf = n as f64;
    let expo = 2.0 * alpha / (alpha + 2.0);
    let mut best = f64::INFINITY;
    for big in grid {
        let d = dimension_by_scan(weights, big);
        if d > n {
            continue;
        }
        let dim = if d == 0 {
            0.0
        } else {
            let df = d as f64;
            df / nf * (nf * std::f64::consts::E * std::f64::consts::E / (df * delta)).ln()
        };
        let margin = (big / delta).powf(expo) * nf.powf(-2.0 / (alpha + 2.0));
        best = best.min(dim + margin);
    }
    best.max(2.0 * nf.ln() / nf)
}

pub fn empirical_cdf(margins: &[f64], delta: f64) -> f64 {
    margins.iter().filter(|&&m| m <= delta).count() as f64 / margins.len() as f64
}

/// `sup{delta in (0,1): delta^gamma P_n{f <= delta} <= n^(gamma/2-1)}` from a
/// grid of step 1e-4, refined by bisection between the last feasible and the
/// first infeasible grid points.
pub fn gamma_margin_by_grid(margins: &[f64], gamma: f64) -> f64 {
    let n = margins.len() as f64;
    let level = n.powf(gamma / 2.0 - 1.0);
    let ok = |d: f64| d.powf(gamma) * empirical_cdf(margins, d) <= level;
    let mut lo = 0.0;
    let mut hi = 1.0;
    for j in 1..10_000 {
        let d = j as f64 / 10_000.0;
        if ok(d) {
            lo = d;
        } else {
            hi = d;
            break;
        }
    }
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Solves a square system by Gaussian elimination with partial pivoting;
/// `None` when (numerically) singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let p = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            for c in col..m {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn subsets(k: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == m {
        out.push(cur.clone());
        return;
    }
    for j in start..k {
        cur.push(j);
        subsets(k, m, j + 1, cur, out);
        cur.pop();
    }
}

/// Minimum of `c.x` over `Ax = b, x >= 0` by enumerating every basic
/// solution; `None` when no basic solution is feasible. Assumes full row rank.
pub fn lp_by_vertices(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let (m, k) = (a.len(), c.len());
    let mut all = Vec::new();
    subsets(k, m, 0, &mut Vec::new(), &mut all);
    let mut best: Option<f64> = None;
    for cols in all {
        let sub: Vec<Vec<f64>> = a
            .iter()
            .map(|row| cols.iter().map(|&j| row[j]).collect())
            .collect();
        if let Some(xb) = solve_square(sub, b.to_vec()) {
            if xb.iter().all(|&v| v >= -1e-9) {
                let v: f64 = cols.iter().zip(&xb).map(|(&j, x)| c[j] * x).sum();
                best = Some(best.map_or(v, |bv: f64| bv.min(v)));
            }
        }
    }
    best
}

/// A random bounded, feasible standard-form LP: the first row is the
/// all-ones row and `b = A x0` for a random nonnegative `x0`.
pub fn random_feasible_lp(g: &mut impl Rng) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let m = g.random_range(2..=4);
    let k = g.random_range(m + 1..=7);
    let mut a = vec![vec![1.0; k]];
    for _ in 1..m {
        a.push((0..k).map(|_| g.random_range(-3..=3) as f64).collect());
    }
    let x0: Vec<f64> = (0..k)
        .map(|_| {
            if g.random_bool(0.3) {
                0.0
            } else {
                g.random_range(0..=4) as f64
            }
        })
        .collect();
    let b = a
        .iter()
        .map(|row| row.iter().zip(&x0).map(|(r, x)| r * x).sum())
        .collect();
    let c = (0..k).map(|_| g.random_range(-5..=5) as f64).collect();
    (c, a, b)
}

/// Full row rank check by elimination.
pub fn full_row_rank(a: &[Vec<f64>]) -> bool {
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let rows = m.len();
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
        else {
            break;
        };
        if m[p][col].abs() < 1e-9 {
            continue;
        }
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank {
                let f = m[r][col] / m[rank][col];
                for c in 0..cols {
                    m[r][c] -= f * m[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank == rows
}

/// `sup_h |n^-1 sum sigma_i h(X_i)|` over every stump, by direct evaluation.
pub fn rademacher_sup_by_enumeration(ds: &LabeledDataset, signs: &[i8]) -> f64 {
    let mut best = 0.0f64;
    for j in 0..ds.dim() {
        let mut vals: Vec<f64> = (0..ds.len()).map(|i| ds.value(i, j)).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        let mut thr = vec![f64::NEG_INFINITY];
        thr.extend(vals.windows(2).map(|p| (p[0] + p[1]) / 2.0));
        thr.push(f64::INFINITY);
        for t in thr {
            let s = Stump::new(j, t, Orientation::Le);
            let v: i64 = (0..ds.len())
                .map(|i| i64::from(signs[i]) * i64::from(s.eval(ds.row(i))))
                .sum();
            best = best.max((v.abs() as f64) / ds.len() as f64);
        }
    }
    best
}
