//! Thresholded gradient descent on the squared ramp risk.
//!
//! With `F = a0 + X a` and `v_i = I(|F_i| < 1)`, the negative gradient is
//! `g_k = (2/N) sum_i v_i (y_i - F_i) x_ik`. Each iteration moves every
//! coordinate with `|g_k| >= tau ||g||_inf` by `delta * g_k`.
//!
//! After a step `D` on the active set `A`, with `z = v' - v`,
//!
//! ```text
//! g'_k = g_k + (2/N) sum_{z_n != 0} z_n (y_n - F_n) x_nk
//!            - sum_{j in A} D_j u(v'; x_j, x_k),
//! u(v; x_j, x_k) = (2/N) sum_n v_n x_nj x_nk,
//! ```
//!
//! where `F` is the score before the step. [`PathbuildState`] caches the
//! `u(v; x_j, .)` rows of columns it has stepped on and keeps them current
//! as indicators flip, so a step costs `O(|A| K)` plus `O(C K)` per flip,
//! with `C` cached rows, instead of a full `O(N K)` pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{ramp, LossKind};
use crate::rules::{dot, FeatureMatrix};

use super::{check_labels_len, fit_intercept, Coefficients, PathStep, SolverReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathbuildConfig {
    pub tau: f64,
    pub delta: f64,
    pub max_iter: usize,
    /// Stop once `||g||_inf` falls below this.
    pub tolerance: f64,
}

impl Default for PathbuildConfig {
    fn default() -> Self {
        PathbuildConfig {
            tau: 0.3,
            delta: 0.01,
            max_iter: 5000,
            tolerance: 1e-6,
        }
    }
}

/// Entries of `u` rows kept in memory before falling back to full passes.
const CACHE_BUDGET: usize = 1 << 24;

/// Coefficients, scores, indicators and gradient of a pathbuild run, with
/// the cross-moment rows needed for incremental gradient updates.
#[derive(Debug, Clone)]
pub struct PathbuildState<'a> {
    fm: &'a FeatureMatrix,
    y: &'a [f64],
    intercept: f64,
    a: Vec<f64>,
    f: Vec<f64>,
    v: Vec<bool>,
    g: Vec<f64>,
    cache: Vec<Option<Vec<f64>>>,
    cached: Vec<usize>,
    max_cached: usize,
    flips: usize,
    incremental_steps: usize,
}

impl<'a> PathbuildState<'a> {
    /// State at `a = 0` with the given intercept.
    pub fn new(fm: &'a FeatureMatrix, labels: &'a [f64], intercept: f64) -> Result<Self> {
        Self::with_coefficients(fm, labels, intercept, vec![0.0; fm.n_cols()])
    }

    pub fn with_coefficients(fm: &'a FeatureMatrix, labels: &'a [f64], intercept: f64, a: Vec<f64>) -> Result<Self> {
        check_labels_len(fm, labels)?;
        if a.len() != fm.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: fm.n_cols(),
                found: a.len(),
            });
        }
        let f: Vec<f64> = fm.matvec(&a).into_iter().map(|s| s + intercept).collect();
        let v: Vec<bool> = f.iter().map(|s| s.abs() < 1.0).collect();
        let g = gradient_at(fm, labels, &f, &v);
        let k = fm.n_cols();
        Ok(PathbuildState {
            fm,
            y: labels,
            intercept,
            a,
            f,
            v,
            g,
            cache: vec![None; k],
            cached: Vec::new(),
            max_cached: (CACHE_BUDGET / k.max(1)).max(1),
            flips: 0,
            incremental_steps: 0,
        })
    }

    /// Current negative gradient.
    pub fn gradient(&self) -> &[f64] {
        &self.g
    }

    pub fn coefficients(&self) -> Coefficients {
        Coefficients {
            intercept: self.intercept,
            weights: self.a.clone(),
        }
    }

    pub fn scores(&self) -> &[f64] {
        &self.f
    }

    pub fn indicators(&self) -> &[bool] {
        &self.v
    }

    /// Squared ramp risk of the current coefficients.
    pub fn risk(&self) -> f64 {
        let n = self.y.len() as f64;
        self.y.iter().zip(&self.f).map(|(y, f)| (y - ramp(*f)).powi(2)).sum::<f64>() / n
    }

    /// Total indicator flips so far.
    pub fn flips(&self) -> usize {
        self.flips
    }

    /// Steps whose gradient came from the incremental update.
    pub fn incremental_steps(&self) -> usize {
        self.incremental_steps
    }

    /// Gradient recomputed from scratch: scores, indicators and the sum.
    pub fn naive_gradient(&self) -> Vec<f64> {
        let f: Vec<f64> = self.fm.matvec(&self.a).into_iter().map(|s| s + self.intercept).collect();
        let v: Vec<bool> = f.iter().map(|s| s.abs() < 1.0).collect();
        gradient_at(self.fm, self.y, &f, &v)
    }

    fn u_row(&self, j: usize, v: &[bool]) -> Vec<f64> {
        let scale = 2.0 / self.y.len() as f64;
        let w: Vec<f64> = self
            .fm
            .column(j)
            .iter()
            .zip(v)
            .map(|(&x, &on)| if on { x } else { 0.0 })
            .collect();
        (0..self.fm.n_cols()).map(|k| scale * dot(&w, self.fm.column(k))).collect()
    }

    /// Add `delta_j` to each listed coefficient and bring scores, indicators
    /// and gradient up to date. Returns the number of indicator flips.
    pub fn apply_step(&mut self, step: &[(usize, f64)]) -> usize {
        let n = self.y.len();
        let k_total = self.fm.n_cols();
        let scale = 2.0 / n as f64;
        let step: Vec<(usize, f64)> = step.iter().copied().filter(|&(_, d)| d != 0.0).collect();
        if step.is_empty() {
            return 0;
        }

        let old_f = self.f.clone();
        for &(j, d) in &step {
            self.a[j] += d;
            for (fi, &x) in self.f.iter_mut().zip(self.fm.column(j)) {
                if x != 0.0 {
                    *fi += d * x;
                }
            }
        }
        let mut flipped: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            let on = self.f[i].abs() < 1.0;
            if on != self.v[i] {
                flipped.push((i, if on { 1.0 } else { -1.0 }));
                self.v[i] = on;
            }
        }
        self.flips += flipped.len();

        // keep cached rows equal to u(v'; x_j, .)
        for &j in &self.cached {
            let row = self.cache[j].as_mut().expect("listed columns are cached");
            let xj = self.fm.column(j);
            for &(i, z) in &flipped {
                let c = scale * z * xj[i];
                if c != 0.0 {
                    for (k, u) in row.iter_mut().enumerate() {
                        *u += c * self.fm.get(i, k);
                    }
                }
            }
        }

        let uncached: Vec<usize> = step.iter().map(|&(j, _)| j).filter(|&j| self.cache[j].is_none()).collect();
        if self.cached.len() + uncached.len() <= self.max_cached {
            for j in uncached {
                let row = self.u_row(j, &self.v);
                self.cache[j] = Some(row);
                self.cached.push(j);
            }
            for &(i, z) in &flipped {
                let c = scale * z * (self.y[i] - old_f[i]);
                for (k, g) in self.g.iter_mut().enumerate() {
                    *g += c * self.fm.get(i, k);
                }
            }
            for &(j, d) in &step {
                let row = self.cache[j].as_ref().expect("cached above");
                for (g, u) in self.g.iter_mut().zip(row) {
                    *g -= d * u;
                }
            }
            self.incremental_steps += 1;
        } else {
            self.g = gradient_at(self.fm, self.y, &self.f, &self.v);
        }
        debug_assert_eq!(self.g.len(), k_total);
        flipped.len()
    }
}

fn gradient_at(fm: &FeatureMatrix, y: &[f64], f: &[f64], v: &[bool]) -> Vec<f64> {
    let scale = 2.0 / y.len() as f64;
    let w: Vec<f64> = y
        .iter()
        .zip(f)
        .zip(v)
        .map(|((y, f), &on)| if on { y - f } else { 0.0 })
        .collect();
    (0..fm.n_cols()).map(|k| scale * dot(&w, fm.column(k))).collect()
}

pub fn pathbuild(
    fm: &FeatureMatrix,
    labels: &[f64],
    tau: f64,
    delta: f64,
    max_iter: usize,
) -> Result<(Coefficients, SolverReport)> {
    pathbuild_with(
        fm,
        labels,
        &PathbuildConfig {
            tau,
            delta,
            max_iter,
            ..PathbuildConfig::default()
        },
    )
}

/// Run thresholded gradient descent from `a = 0` and return the iterate
/// with the lowest risk. The run stops when the risk increases, the
/// gradient vanishes, or `max_iter` steps have been taken.
pub fn pathbuild_with(fm: &FeatureMatrix, labels: &[f64], cfg: &PathbuildConfig) -> Result<(Coefficients, SolverReport)> {
    if !(0.0..=1.0).contains(&cfg.tau) {
        return Err(Error::param("tau must lie in [0, 1]"));
    }
    if !(cfg.delta > 0.0 && cfg.delta.is_finite()) {
        return Err(Error::param("delta must be positive"));
    }
    check_labels_len(fm, labels)?;
    if let Some(&bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
        return Err(Error::NonBinaryLabel(bad));
    }
    if (0..fm.n_cols()).all(|k| fm.column(k).iter().all(|&x| x == 0.0)) {
        return Err(Error::AllZeroFeatures);
    }
    for k in 0..fm.n_cols() {
        if fm.column(k).iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteFeature(k));
        }
    }

    let intercept = fit_intercept(labels, LossKind::SquaredRamp);
    let mut state = PathbuildState::new(fm, labels, intercept)?;
    let mut report = SolverReport::new("pathbuild", "iteration");
    let mut best_risk = state.risk();
    let mut best = state.coefficients();
    report.steps.push(PathStep {
        param: 0.0,
        objective: best_risk,
        risk: best_risk,
        nonzeros: 0,
        coefficients: None,
    });

    for it in 1..=cfg.max_iter {
        let g = state.gradient();
        let g_inf = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if g_inf < cfg.tolerance {
            break;
        }
        let cut = cfg.tau * g_inf;
        let step: Vec<(usize, f64)> = g
            .iter()
            .enumerate()
            .filter(|(_, gk)| gk.abs() >= cut)
            .map(|(k, &gk)| (k, cfg.delta * gk))
            .collect();
        state.apply_step(&step);
        let r = state.risk();
        report.steps.push(PathStep {
            param: it as f64,
            objective: r,
            risk: r,
            nonzeros: state.a.iter().filter(|&&w| w != 0.0).count(),
            coefficients: None,
        });
        if r > best_risk {
            break;
        }
        best_risk = r;
        best = state.coefficients();
    }
    if let Some(last) = report.steps.last_mut() {
        last.coefficients = Some(best.clone());
    }
    Ok((best, report))
}
