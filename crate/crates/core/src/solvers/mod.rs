//! Sparse linear fitting of ensemble coefficients.
//!
//! [`pathbuild`] minimizes the ramp risk by thresholded gradient descent.
//! The other three solvers work on the least-squares problem after
//! centering the labels and standardizing each column:
//!
//! * [`cd_elastic_net`]: coordinate descent along a decreasing penalty path.
//! * [`fpc`]: shrinkage fixed-point iterations along an increasing `mu` path.
//! * [`spg_lasso`]: projected gradient over an L1 ball of radius `sigma`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::rules::FeatureMatrix;

mod cdnet;
mod fpc;
pub mod least_squares;
mod pathbuild;
mod prox;
mod spg;

pub use cdnet::{cd_elastic_net, cd_elastic_net_with, CdConfig};
pub use fpc::{fpc, fpc_with, FpcConfig};
pub use least_squares::LeastSquaresProblem;
pub use pathbuild::{pathbuild, pathbuild_with, PathbuildConfig, PathbuildState};
pub use prox::{project_l1, soft_threshold};
pub use spg::{spg_lasso, spg_lasso_with, SpgConfig};

/// Intercept and term weights of a fitted linear model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub intercept: f64,
    pub weights: Vec<f64>,
}

impl Coefficients {
    pub fn constant(intercept: f64, n_terms: usize) -> Self {
        Coefficients {
            intercept,
            weights: vec![0.0; n_terms],
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }

    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    /// `a0 + a . f` for one row of term values.
    pub fn score(&self, terms: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(terms).map(|(a, f)| a * f).sum::<f64>()
    }

    /// Scores of every row of `fm`.
    pub fn scores(&self, fm: &FeatureMatrix) -> Vec<f64> {
        let mut out = fm.matvec(&self.weights);
        for s in &mut out {
            *s += self.intercept;
        }
        out
    }
}

/// Risk-minimizing constant score for `labels`.
pub fn fit_intercept(labels: &[f64], kind: LossKind) -> f64 {
    kind.optimal_constant(labels)
}

/// One point along a solver's path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    /// Path parameter: `lambda`, `mu`, `sigma`, or the iteration count.
    pub param: f64,
    pub objective: f64,
    /// Training risk of the coefficients at this step.
    pub risk: f64,
    pub nonzeros: usize,
    pub coefficients: Option<Coefficients>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub solver: &'static str,
    pub param_name: &'static str,
    pub steps: Vec<PathStep>,
}

impl SolverReport {
    pub(crate) fn new(solver: &'static str, param_name: &'static str) -> Self {
        SolverReport {
            solver,
            param_name,
            steps: Vec::new(),
        }
    }

    /// Coefficients of the last step that carries a snapshot.
    pub fn final_coefficients(&self) -> Option<&Coefficients> {
        self.steps.iter().rev().find_map(|s| s.coefficients.as_ref())
    }

    /// Columns: step, parameter, objective, risk, nonzeros.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["step", "parameter", "objective", "risk", "nonzeros"])?;
        for (i, s) in self.steps.iter().enumerate() {
            w.write_record([
                i.to_string(),
                s.param.to_string(),
                s.objective.to_string(),
                s.risk.to_string(),
                s.nonzeros.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<report>", e))?;
        Ok(())
    }
}

pub(crate) fn check_labels_len(fm: &FeatureMatrix, labels: &[f64]) -> Result<()> {
    if labels.len() != fm.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: fm.n_rows(),
            found: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::param("no observations"));
    }
    Ok(())
}

/// Mean squared error of `coefs` on `fm`.
pub(crate) fn mse(fm: &FeatureMatrix, labels: &[f64], coefs: &Coefficients) -> f64 {
    let scores = coefs.scores(fm);
    labels.iter().zip(&scores).map(|(y, f)| (y - f).powi(2)).sum::<f64>() / labels.len() as f64
}
