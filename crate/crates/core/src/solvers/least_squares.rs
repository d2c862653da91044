//! The standardized least-squares problem shared by the elastic net, FPC and
//! SPG solvers.
//!
//! Labels are centered and every column is centered and scaled to unit
//! second moment, so the intercept drops out. Columns with zero variance
//! cannot carry weight and are left out. Coefficients in this space are
//! called standardized; [`LeastSquaresProblem::to_original`] maps them back.

use crate::error::{Error, Result};
use crate::rules::{dot, FeatureMatrix};

use super::{check_labels_len, Coefficients};

#[derive(Debug, Clone)]
pub struct LeastSquaresProblem {
    n: usize,
    n_terms: usize,
    kept: Vec<usize>,
    z: Vec<f64>,
    means: Vec<f64>,
    scales: Vec<f64>,
    y: Vec<f64>,
    y_mean: f64,
}

impl LeastSquaresProblem {
    pub fn new(fm: &FeatureMatrix, labels: &[f64]) -> Result<Self> {
        check_labels_len(fm, labels)?;
        let n = fm.n_rows();
        let nf = n as f64;
        let y_mean = labels.iter().sum::<f64>() / nf;
        let y = labels.iter().map(|v| v - y_mean).collect();

        let mut kept = Vec::new();
        let mut z = Vec::new();
        let mut means = Vec::new();
        let mut scales = Vec::new();
        for k in 0..fm.n_cols() {
            let col = fm.column(k);
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature(k));
            }
            let mean = col.iter().sum::<f64>() / nf;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
            let scale = var.sqrt();
            if !(scale > 1e-12 * mean.abs().max(1.0)) {
                continue;
            }
            kept.push(k);
            means.push(mean);
            scales.push(scale);
            z.extend(col.iter().map(|v| (v - mean) / scale));
        }
        Ok(LeastSquaresProblem {
            n,
            n_terms: fm.n_cols(),
            kept,
            z,
            means,
            scales,
            y,
            y_mean,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    /// Number of columns that enter the problem.
    pub fn dim(&self) -> usize {
        self.kept.len()
    }

    /// Original column index of each standardized column.
    pub fn kept_columns(&self) -> &[usize] {
        &self.kept
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.z[j * self.n..(j + 1) * self.n]
    }

    /// Centered labels.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    /// `Z a`.
    pub fn apply(&self, a: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (j, &aj) in a.iter().enumerate() {
            if aj != 0.0 {
                for (o, &x) in out.iter_mut().zip(self.column(j)) {
                    *o += aj * x;
                }
            }
        }
        out
    }

    /// `Z^T r`.
    pub fn apply_t(&self, r: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|j| dot(self.column(j), r)).collect()
    }

    /// `y - Z a`.
    pub fn residual(&self, a: &[f64]) -> Vec<f64> {
        let za = self.apply(a);
        self.y.iter().zip(za).map(|(y, f)| y - f).collect()
    }

    /// `||Z a - y||^2`.
    pub fn rss(&self, a: &[f64]) -> f64 {
        self.residual(a).iter().map(|r| r * r).sum()
    }

    /// `(1/N) ||y - Z a||^2 + lambda (alpha ||a||_1 + (1 - alpha) ||a||^2)`.
    pub fn elastic_net_objective(&self, a: &[f64], lambda: f64, alpha: f64) -> f64 {
        let l1: f64 = a.iter().map(|v| v.abs()).sum();
        let l2: f64 = a.iter().map(|v| v * v).sum();
        self.rss(a) / self.n as f64 + lambda * (alpha * l1 + (1.0 - alpha) * l2)
    }

    /// `||a||_1 + (mu / 2) ||Z a - y||^2`.
    pub fn fpc_objective(&self, a: &[f64], mu: f64) -> f64 {
        a.iter().map(|v| v.abs()).sum::<f64>() + 0.5 * mu * self.rss(a)
    }

    /// `(1/2) ||Z a - y||^2`.
    pub fn constrained_objective(&self, a: &[f64]) -> f64 {
        0.5 * self.rss(a)
    }

    /// `||Z^T y||_inf`; any L1 penalty above this scale zeroes every weight.
    pub fn max_correlation(&self) -> f64 {
        self.apply_t(&self.y).iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Power-iteration estimate of the largest eigenvalue of `Z^T Z`,
    /// inflated slightly so it bounds the true value.
    pub fn lipschitz(&self) -> f64 {
        let d = self.dim();
        if d == 0 {
            return 0.0;
        }
        let mut v = vec![1.0 / (d as f64).sqrt(); d];
        let mut est = 0.0;
        for _ in 0..100 {
            let w = self.apply_t(&self.apply(&v));
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let prev = est;
            est = norm;
            v = w.into_iter().map(|x| x / norm).collect();
            if (est - prev).abs() <= 1e-10 * est {
                break;
            }
        }
        est * 1.01
    }

    /// Map standardized weights back to the original columns and restore the
    /// intercept.
    pub fn to_original(&self, a: &[f64]) -> Coefficients {
        let mut c = Coefficients::constant(self.y_mean, self.n_terms);
        for (j, &aj) in a.iter().enumerate() {
            if aj != 0.0 {
                let w = aj / self.scales[j];
                c.weights[self.kept[j]] = w;
                c.intercept -= w * self.means[j];
            }
        }
        c
    }

    /// Standardized weights of original-space coefficients. Weights on
    /// excluded columns are dropped.
    pub fn to_standardized(&self, c: &Coefficients) -> Vec<f64> {
        self.kept
            .iter()
            .zip(&self.scales)
            .map(|(&k, &s)| c.weights[k] * s)
            .collect()
    }
}
