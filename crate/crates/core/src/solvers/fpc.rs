//! Fixed-point continuation for `min ||a||_1 + (mu/2) ||Z a - y||^2`.
//!
//! Each stage iterates `a <- shrink(a - t g, t / mu)` with
//! `g = Z^T (Z a - y)`, using Barzilai-Borwein step lengths guarded by a
//! nonmonotone acceptance test. Stages run along a geometric `mu` path,
//! each warm-started from the previous solution.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::FeatureMatrix;

use super::cdnet::geometric_path;
use super::least_squares::LeastSquaresProblem;
use super::prox::soft_threshold;
use super::{mse, PathStep, SolverReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpcConfig {
    pub mu_max: f64,
    pub n_steps: usize,
    /// The path starts at `eta / ||Z^T y||_inf`, just below the value where
    /// the first weight turns on.
    pub eta: f64,
    /// Stage convergence bound on `||a_new - a|| / max(||a||, 1)`.
    pub tolerance: f64,
    pub max_iter: usize,
    pub barzilai_borwein: bool,
}

impl Default for FpcConfig {
    fn default() -> Self {
        FpcConfig {
            mu_max: 1.0,
            n_steps: 13,
            eta: 0.99,
            tolerance: 1e-7,
            max_iter: 20_000,
            barzilai_borwein: true,
        }
    }
}

pub fn fpc(fm: &FeatureMatrix, labels: &[f64], mu_max: f64, n_steps: usize) -> Result<SolverReport> {
    fpc_with(
        fm,
        labels,
        &FpcConfig {
            mu_max,
            n_steps,
            ..FpcConfig::default()
        },
    )
}

const MEMORY: usize = 5;

struct Stage<'a> {
    p: &'a LeastSquaresProblem,
    inv_lipschitz: f64,
}

impl Stage<'_> {
    fn gradient(&self, a: &[f64]) -> Vec<f64> {
        let r = self.p.residual(a);
        self.p.apply_t(&r).into_iter().map(|v| -v).collect()
    }

    fn solve(&self, a: &mut Vec<f64>, mu: f64, cfg: &FpcConfig) {
        let mut g = self.gradient(a);
        let mut recent: VecDeque<f64> = VecDeque::from([self.p.fpc_objective(a, mu)]);
        let mut step = self.inv_lipschitz;
        for _ in 0..cfg.max_iter {
            let max_recent = recent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let (next, obj) = loop {
                let cand: Vec<f64> = a
                    .iter()
                    .zip(&g)
                    .map(|(&x, &gx)| soft_threshold(x - step * gx, step / mu))
                    .collect();
                let obj = self.p.fpc_objective(&cand, mu);
                if step <= self.inv_lipschitz || obj <= max_recent {
                    break (cand, obj);
                }
                step = (0.5 * step).max(self.inv_lipschitz);
            };

            let g_next = self.gradient(&next);
            let (mut ss, mut sy, mut change, mut norm) = (0.0, 0.0, 0.0, 0.0);
            for j in 0..a.len() {
                let s = next[j] - a[j];
                ss += s * s;
                sy += s * (g_next[j] - g[j]);
                change += s * s;
                norm += next[j] * next[j];
            }
            *a = next;
            g = g_next;
            recent.push_back(obj);
            if recent.len() > MEMORY {
                recent.pop_front();
            }
            if change.sqrt() / norm.sqrt().max(1.0) < cfg.tolerance {
                break;
            }
            step = if cfg.barzilai_borwein && sy > 0.0 {
                (ss / sy).clamp(self.inv_lipschitz, 1e6 * self.inv_lipschitz)
            } else {
                self.inv_lipschitz
            };
        }
    }
}

pub fn fpc_with(fm: &FeatureMatrix, labels: &[f64], cfg: &FpcConfig) -> Result<SolverReport> {
    if !(cfg.mu_max > 0.0 && cfg.mu_max.is_finite()) {
        return Err(Error::param("mu_max must be positive"));
    }
    if !(cfg.eta > 0.0) {
        return Err(Error::param("eta must be positive"));
    }
    if cfg.n_steps == 0 {
        return Err(Error::param("n_steps must be at least 1"));
    }
    let p = LeastSquaresProblem::new(fm, labels)?;
    let lip = p.lipschitz();
    let corr = p.max_correlation();
    let path = if corr > 0.0 {
        geometric_path(cfg.eta / corr, cfg.mu_max, cfg.n_steps)
    } else {
        vec![cfg.mu_max; cfg.n_steps]
    };

    let stage = Stage {
        p: &p,
        inv_lipschitz: if lip > 0.0 { 1.0 / lip } else { 1.0 },
    };
    let mut a = vec![0.0; p.dim()];
    let mut report = SolverReport::new("fpc", "mu");
    for mu in path {
        if p.dim() > 0 {
            stage.solve(&mut a, mu, cfg);
        }
        let coefs = p.to_original(&a);
        report.steps.push(PathStep {
            param: mu,
            objective: p.fpc_objective(&a, mu),
            risk: mse(fm, labels, &coefs),
            nonzeros: coefs.nonzero_count(),
            coefficients: Some(coefs),
        });
    }
    Ok(report)
}
