//! Spectral projected gradient for `min (1/2) ||Z a - y||^2` subject to
//! `||a||_1 <= sigma`.
//!
//! Iterates move along `P(a - t g) - a` with Barzilai-Borwein `t`. A
//! backtracking line search enforces sufficient decrease against the
//! current objective, so accepted objectives never increase. Every iterate
//! is a convex combination of feasible points and stays in the ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::FeatureMatrix;

use super::least_squares::LeastSquaresProblem;
use super::prox::project_l1;
use super::{mse, Coefficients, PathStep, SolverReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpgConfig {
    pub sigma: f64,
    pub max_iter: usize,
    /// Stop when `||P(a - g) - a||_inf` falls below this.
    pub tolerance: f64,
}

impl Default for SpgConfig {
    fn default() -> Self {
        SpgConfig {
            sigma: 1.0,
            max_iter: 10_000,
            tolerance: 1e-6,
        }
    }
}

pub fn spg_lasso(fm: &FeatureMatrix, labels: &[f64], sigma: f64, max_iter: usize) -> Result<(Coefficients, SolverReport)> {
    spg_lasso_with(
        fm,
        labels,
        &SpgConfig {
            sigma,
            max_iter,
            ..SpgConfig::default()
        },
    )
}

const STEP_MIN: f64 = 1e-10;
const STEP_MAX: f64 = 1e10;
const SUFFICIENT_DECREASE: f64 = 1e-4;

fn projected_gradient_norm(a: &[f64], g: &[f64], sigma: f64) -> f64 {
    let trial: Vec<f64> = a.iter().zip(g).map(|(x, gx)| x - gx).collect();
    project_l1(&trial, sigma)
        .iter()
        .zip(a)
        .fold(0.0f64, |m, (p, x)| m.max((p - x).abs()))
}

pub fn spg_lasso_with(fm: &FeatureMatrix, labels: &[f64], cfg: &SpgConfig) -> Result<(Coefficients, SolverReport)> {
    if !(cfg.sigma >= 0.0 && cfg.sigma.is_finite()) {
        return Err(Error::param("sigma must be non-negative"));
    }
    let p = LeastSquaresProblem::new(fm, labels)?;
    let dim = p.dim();
    let mut report = SolverReport::new("spg_lasso", "sigma");

    let mut a = vec![0.0; dim];
    let mut r = p.residual(&a);
    let mut obj = 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    let mut g: Vec<f64> = p.apply_t(&r).into_iter().map(|v| -v).collect();
    let g_inf = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut step = if g_inf > 0.0 { (1.0 / g_inf).clamp(STEP_MIN, STEP_MAX) } else { 1.0 };

    let push = |report: &mut SolverReport, a: &[f64], obj: f64, it: usize, last: bool| {
        let coefs = p.to_original(a);
        report.steps.push(PathStep {
            param: it as f64,
            objective: obj,
            risk: mse(fm, labels, &coefs),
            nonzeros: coefs.nonzero_count(),
            coefficients: last.then_some(coefs),
        });
    };

    let mut it = 0;
    while dim > 0 && it < cfg.max_iter && projected_gradient_norm(&a, &g, cfg.sigma) >= cfg.tolerance {
        it += 1;
        let trial: Vec<f64> = a.iter().zip(&g).map(|(x, gx)| x - step * gx).collect();
        let d: Vec<f64> = project_l1(&trial, cfg.sigma).iter().zip(&a).map(|(p, x)| p - x).collect();
        let gtd: f64 = g.iter().zip(&d).map(|(x, y)| x * y).sum();
        let zd = p.apply(&d);

        // objective along a + t d is quadratic: obj - t <r, Zd> + t^2 |Zd|^2 / 2
        let rzd: f64 = r.iter().zip(&zd).map(|(x, y)| x * y).sum();
        let zdzd: f64 = zd.iter().map(|x| x * x).sum();
        let mut t = 1.0;
        let mut new_obj = obj - t * rzd + 0.5 * t * t * zdzd;
        while new_obj > obj + SUFFICIENT_DECREASE * t * gtd && t > 1e-12 {
            t *= 0.5;
            new_obj = obj - t * rzd + 0.5 * t * t * zdzd;
        }
        if new_obj > obj {
            break;
        }

        for (x, dx) in a.iter_mut().zip(&d) {
            *x += t * dx;
        }
        for (ri, z) in r.iter_mut().zip(&zd) {
            *ri -= t * z;
        }
        obj = 0.5 * r.iter().map(|v| v * v).sum::<f64>();
        let g_next: Vec<f64> = p.apply_t(&r).into_iter().map(|v| -v).collect();

        // s = t d, y = g_next - g = t Z^T Z d
        let sy = t * t * zdzd;
        let ss = t * t * d.iter().map(|x| x * x).sum::<f64>();
        step = if sy > 0.0 { (ss / sy).clamp(STEP_MIN, STEP_MAX) } else { STEP_MAX };
        g = g_next;
        push(&mut report, &a, obj, it, false);
    }
    push(&mut report, &a, obj, it, true);
    let coefs = report.final_coefficients().cloned().expect("final step carries coefficients");
    Ok((coefs, report))
}
