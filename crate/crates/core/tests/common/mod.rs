//! Independent oracles and seeded instances shared by the test targets.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rule_ensemble::dataset::Dataset;
use rule_ensemble::rules::FeatureMatrix;
use rule_ensemble::solvers::Coefficients;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense `n x k` matrix with entries uniform on `[-1, 1]`.
pub fn random_rows(n: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..n).map(|_| (0..k).map(|_| r.random_range(-1.0..1.0)).collect()).collect()
}

/// Noisy linear regression target `y = 0.5 + X w + noise`, with about half
/// of `w` zero.
pub fn regression_instance(n: usize, k: usize, seed: u64) -> (FeatureMatrix, Vec<f64>) {
    let rows = random_rows(n, k, seed);
    let mut r = rng(seed ^ 0x5eed);
    let w: Vec<f64> = (0..k)
        .map(|j| if j % 2 == 0 { r.random_range(-2.0..2.0) } else { 0.0 })
        .collect();
    let y = rows
        .iter()
        .map(|x| 0.5 + x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + 0.3 * r.random_range(-1.0..1.0))
        .collect();
    (FeatureMatrix::from_rows(&rows).unwrap(), y)
}

/// Binary classification instance with 0/1 rule-like columns and ±1 labels.
pub fn indicator_instance(n: usize, k: usize, seed: u64) -> (FeatureMatrix, Vec<f64>) {
    let mut r = rng(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..k).map(|_| f64::from(u8::from(r.random_bool(0.4)))).collect())
        .collect();
    let y = rows
        .iter()
        .map(|x| {
            let s = x[0] - x[1] + 0.5 * x[2] - 0.2 + 0.8 * r.random_range(-1.0..1.0);
            if s >= 0.0 { 1.0 } else { -1.0 }
        })
        .collect();
    (FeatureMatrix::from_rows(&rows).unwrap(), y)
}

pub fn fm_rows(fm: &FeatureMatrix) -> Vec<Vec<f64>> {
    (0..fm.n_rows()).map(|i| fm.row(i)).collect()
}

/// Scores `a0 + x . a` row by row.
pub fn scores(fm: &FeatureMatrix, intercept: f64, a: &[f64]) -> Vec<f64> {
    fm_rows(fm)
        .iter()
        .map(|x| intercept + x.iter().zip(a).map(|(p, q)| p * q).sum::<f64>())
        .collect()
}

/// Squared ramp risk evaluated from its definition.
pub fn ramp_risk(fm: &FeatureMatrix, y: &[f64], intercept: f64, a: &[f64]) -> f64 {
    let f = scores(fm, intercept, a);
    y.iter().zip(&f).map(|(y, f)| (y - f.clamp(-1.0, 1.0)).powi(2)).sum::<f64>() / y.len() as f64
}

/// Negative gradient of the squared ramp risk, summed from scratch.
pub fn ramp_gradient(fm: &FeatureMatrix, y: &[f64], intercept: f64, a: &[f64]) -> Vec<f64> {
    let f = scores(fm, intercept, a);
    let rows = fm_rows(fm);
    let n = y.len() as f64;
    (0..fm.n_cols())
        .map(|k| {
            (0..rows.len())
                .filter(|&i| f[i].abs() < 1.0)
                .map(|i| (y[i] - f[i]) * rows[i][k])
                .sum::<f64>()
                * 2.0
                / n
        })
        .collect()
}

/// Population standard deviation of every column.
pub fn column_scales(fm: &FeatureMatrix) -> Vec<f64> {
    let n = fm.n_rows() as f64;
    (0..fm.n_cols())
        .map(|k| {
            let c = fm.column(k);
            let m = c.iter().sum::<f64>() / n;
            (c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt()
        })
        .collect()
}

/// `(1/N) ||y - a0 - X a||^2 + lambda * sum_k s_k |a_k|`, the lasso objective
/// on standardized columns written in original-scale coefficients.
pub fn lasso_objective(fm: &FeatureMatrix, y: &[f64], c: &Coefficients, lambda: f64) -> f64 {
    let f = scores(fm, c.intercept, &c.weights);
    let rss: f64 = y.iter().zip(&f).map(|(y, f)| (y - f).powi(2)).sum();
    let l1: f64 = column_scales(fm).iter().zip(&c.weights).map(|(s, a)| s * a.abs()).sum();
    rss / y.len() as f64 + lambda * l1
}

/// L1 norm of the coefficients on standardized columns.
pub fn standardized_l1(fm: &FeatureMatrix, c: &Coefficients) -> f64 {
    column_scales(fm).iter().zip(&c.weights).map(|(s, a)| s * a.abs()).sum()
}

/// `2 max_k |z_k . (y - ybar)| / N` for standardized columns `z_k`.
pub fn lasso_lambda_max(fm: &FeatureMatrix, y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let ybar = y.iter().sum::<f64>() / n;
    column_scales(fm)
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let c = fm.column(k);
            let m = c.iter().sum::<f64>() / n;
            (c.iter().zip(y).map(|(x, y)| (x - m) / s * (y - ybar)).sum::<f64>()).abs()
        })
        .fold(0.0, f64::max)
        * 2.0
        / n
}

/// Ordinary least squares with intercept via SVD.
pub fn least_squares(fm: &FeatureMatrix, y: &[f64]) -> Coefficients {
    let n = fm.n_rows();
    let k = fm.n_cols();
    let x = DMatrix::from_fn(n, k + 1, |i, j| if j == 0 { 1.0 } else { fm.get(i, j - 1) });
    let b = DVector::from_column_slice(y);
    let sol = x.svd(true, true).solve(&b, 1e-12).expect("svd solve");
    Coefficients {
        intercept: sol[0],
        weights: sol.iter().skip(1).copied().collect(),
    }
}

/// Minimiser of `0.5 (t - z)^2 + gamma |t|` on `[-10, 10]`: a grid scan
/// followed by golden-section refinement around the best grid point.
pub fn prox_oracle(z: f64, gamma: f64) -> f64 {
    let obj = |t: f64| 0.5 * (t - z).powi(2) + gamma * t.abs();
    let step = 1e-3;
    let mut best = -10.0;
    let mut t = -10.0;
    while t <= 10.0 {
        if obj(t) < obj(best) {
            best = t;
        }
        t += step;
    }
    // the kink at 0 is a candidate the grid may straddle
    if obj(0.0) <= obj(best) {
        best = 0.0;
    }
    let (mut lo, mut hi) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if obj(m1) <= obj(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mid = 0.5 * (lo + hi);
    if obj(0.0) <= obj(mid) { 0.0 } else { mid }
}

/// Projection onto the L1 ball by bisection on the shrinkage level.
pub fn l1_projection_oracle(v: &[f64], sigma: f64) -> Vec<f64> {
    let norm: f64 = v.iter().map(|x| x.abs()).sum();
    if norm <= sigma {
        return v.to_vec();
    }
    let excess = |theta: f64| v.iter().map(|x| (x.abs() - theta).max(0.0)).sum::<f64>() - sigma;
    let (mut lo, mut hi) = (0.0, v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    v.iter().map(|x| x.signum() * (x.abs() - theta).max(0.0)).collect()
}

/// Exhaustive split search: every attribute and every midpoint between
/// consecutive distinct values, children re-partitioned from scratch.
/// Near-ties keep the earlier candidate.
pub fn brute_force_split(
    rows: &[usize],
    targets: &[f64],
    attrs: &[usize],
    data: &Dataset,
    min_count: usize,
) -> Option<(usize, f64)> {
    let sse = |ts: &[f64]| {
        let m = ts.iter().sum::<f64>() / ts.len() as f64;
        ts.iter().map(|t| (t - m).powi(2)).sum::<f64>()
    };
    if sse(targets) <= 0.0 {
        return None;
    }
    let mut sorted = attrs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut best: Option<(usize, f64, f64)> = None;
    for &a in &sorted {
        let mut vals: Vec<f64> = rows.iter().map(|&i| data.value(i, a)).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let thr = 0.5 * (w[0] + w[1]);
            let (mut left, mut right) = (vec![], vec![]);
            for (&i, &t) in rows.iter().zip(targets) {
                if data.value(i, a) < thr {
                    left.push(t);
                } else {
                    right.push(t);
                }
            }
            if left.len() < min_count || right.len() < min_count {
                continue;
            }
            let imp = sse(&left) + sse(&right);
            let better = match best {
                None => true,
                Some((_, _, b)) => imp < b - 1e-9 * b.abs().max(1.0),
            };
            if better {
                best = Some((a, thr, imp));
            }
        }
    }
    best.map(|(a, t, _)| (a, t))
}

/// Misclassification rate of `predicted` against `truth`.
pub fn error_rate(predicted: &[usize], truth: &[usize]) -> f64 {
    predicted.iter().zip(truth).filter(|(p, t)| p != t).count() as f64 / truth.len() as f64
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
