//! Elastic-net coordinate descent along a geometric penalty path.
//!
//! Objective, on the standardized problem:
//! `(1/N) ||y - Z a||^2 + lambda (alpha ||a||_1 + (1 - alpha) ||a||^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::{dot, FeatureMatrix};

use super::least_squares::LeastSquaresProblem;
use super::prox::soft_threshold;
use super::{mse, PathStep, SolverReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdConfig {
    /// Mix between L1 (`1`) and ridge (`0`).
    pub alpha: f64,
    /// Smallest penalty on the path; `None` means `1e-3 * lambda_max`.
    pub lambda_min: Option<f64>,
    pub n_steps: usize,
    /// Convergence bound on the largest coordinate change in a sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for CdConfig {
    fn default() -> Self {
        CdConfig {
            alpha: 1.0,
            lambda_min: None,
            n_steps: 100,
            tolerance: 1e-7,
            max_sweeps: 100_000,
        }
    }
}

pub fn cd_elastic_net(
    fm: &FeatureMatrix,
    labels: &[f64],
    alpha: f64,
    lambda_min: f64,
    n_steps: usize,
) -> Result<SolverReport> {
    cd_elastic_net_with(
        fm,
        labels,
        &CdConfig {
            alpha,
            lambda_min: Some(lambda_min),
            n_steps,
            ..CdConfig::default()
        },
    )
}

/// Smallest penalty whose solution is identically zero.
pub(crate) fn lambda_max(p: &LeastSquaresProblem, alpha: f64) -> f64 {
    2.0 * p.max_correlation() / (p.n_rows() as f64 * alpha.max(1e-3))
}

pub(crate) fn geometric_path(start: f64, end: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![end];
    }
    let ratio = end / start;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                end
            } else {
                start * ratio.powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

struct Cd<'a> {
    p: &'a LeastSquaresProblem,
    a: Vec<f64>,
    r: Vec<f64>,
}

impl Cd<'_> {
    /// One pass over `coords`; returns the largest absolute change.
    fn sweep(&mut self, coords: impl Iterator<Item = usize>, lambda: f64, alpha: f64) -> f64 {
        let nf = self.p.n_rows() as f64;
        let gamma = 0.5 * lambda * alpha;
        let denom = 1.0 + lambda * (1.0 - alpha);
        let mut max_change = 0.0f64;
        for k in coords {
            let z = self.p.column(k);
            let rho = dot(z, &self.r) / nf + self.a[k];
            let t = soft_threshold(rho, gamma) / denom;
            let d = t - self.a[k];
            if d != 0.0 {
                for (r, &zi) in self.r.iter_mut().zip(z) {
                    *r -= d * zi;
                }
                self.a[k] = t;
                max_change = max_change.max(d.abs());
            }
        }
        max_change
    }

    fn solve(&mut self, lambda: f64, cfg: &CdConfig) {
        let dim = self.p.dim();
        let mut sweeps = 0;
        while sweeps < cfg.max_sweeps {
            sweeps += 1;
            if self.sweep(0..dim, lambda, cfg.alpha) < cfg.tolerance {
                break;
            }
            // iterate on the active set until it settles, then recheck all
            while sweeps < cfg.max_sweeps {
                sweeps += 1;
                let active: Vec<usize> = (0..dim).filter(|&k| self.a[k] != 0.0).collect();
                if self.sweep(active.into_iter(), lambda, cfg.alpha) < cfg.tolerance {
                    break;
                }
            }
        }
    }
}

pub fn cd_elastic_net_with(fm: &FeatureMatrix, labels: &[f64], cfg: &CdConfig) -> Result<SolverReport> {
    if !(0.0..=1.0).contains(&cfg.alpha) {
        return Err(Error::param("alpha must lie in [0, 1]"));
    }
    if let Some(l) = cfg.lambda_min {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::param("lambda_min must be positive"));
        }
    }
    if cfg.n_steps == 0 {
        return Err(Error::param("n_steps must be at least 1"));
    }
    let p = LeastSquaresProblem::new(fm, labels)?;
    let lmax = lambda_max(&p, cfg.alpha);
    let lmin = cfg.lambda_min.unwrap_or(1e-3 * lmax);
    let path = if lmax > 0.0 {
        geometric_path(lmax, lmin, cfg.n_steps)
    } else {
        vec![lmin; cfg.n_steps]
    };

    let mut cd = Cd {
        p: &p,
        a: vec![0.0; p.dim()],
        r: p.y().to_vec(),
    };
    let mut report = SolverReport::new("cd_elastic_net", "lambda");
    for lambda in path {
        cd.solve(lambda, cfg);
        let coefs = p.to_original(&cd.a);
        report.steps.push(PathStep {
            param: lambda,
            objective: p.elastic_net_objective(&cd.a, lambda, cfg.alpha),
            risk: mse(fm, labels, &coefs),
            nonzeros: coefs.nonzero_count(),
            coefficients: Some(coefs),
        });
    }
    Ok(report)
}
