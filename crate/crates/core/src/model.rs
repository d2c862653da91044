//! Fitted ensembles `F(x) = a0 + sum_k a_k f_k(x)`, one-versus-all
//! classification, and the JSON model format.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{standardize, Dataset, ScalingParams};
use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::rng::derive_seed;
use crate::rules::{build_feature_matrix, dedupe, generate_rules, BoostConfig, FeatureMatrix, Rule, RuleSet};
use crate::solvers::{
    cd_elastic_net_with, fpc_with, pathbuild_with, spg_lasso_with, CdConfig, Coefficients, FpcConfig,
    PathbuildConfig, SolverReport, SpgConfig,
};

/// Version written to and required of model documents.
pub const FORMAT_VERSION: u32 = 1;

/// Which solver assembles the rules, with its settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum SolverChoice {
    Pathbuild(PathbuildConfig),
    CdElasticNet(CdConfig),
    Fpc(FpcConfig),
    SpgLasso(SpgConfig),
}

impl Default for SolverChoice {
    fn default() -> Self {
        SolverChoice::Pathbuild(PathbuildConfig::default())
    }
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::Pathbuild(_) => "pathbuild",
            SolverChoice::CdElasticNet(_) => "cd_elastic_net",
            SolverChoice::Fpc(_) => "fpc",
            SolverChoice::SpgLasso(_) => "spg_lasso",
        }
    }

    /// The solver's main parameter and its value; `None` for an automatic
    /// `lambda_min`.
    pub fn param(&self) -> (&'static str, Option<f64>) {
        match self {
            SolverChoice::Pathbuild(c) => ("tau", Some(c.tau)),
            SolverChoice::CdElasticNet(c) => ("lambda_min", c.lambda_min),
            SolverChoice::Fpc(c) => ("mu_max", Some(c.mu_max)),
            SolverChoice::SpgLasso(c) => ("sigma", Some(c.sigma)),
        }
    }

    /// Fit coefficients; path solvers return the last point of the path.
    pub fn fit(&self, fm: &FeatureMatrix, labels: &[f64]) -> Result<(Coefficients, SolverReport)> {
        let report = match self {
            SolverChoice::Pathbuild(c) => return pathbuild_with(fm, labels, c),
            SolverChoice::SpgLasso(c) => return spg_lasso_with(fm, labels, c),
            SolverChoice::CdElasticNet(c) => cd_elastic_net_with(fm, labels, c)?,
            SolverChoice::Fpc(c) => fpc_with(fm, labels, c)?,
        };
        let coefs = report
            .final_coefficients()
            .cloned()
            .expect("path solvers snapshot every step");
        Ok((coefs, report))
    }
}

/// Base learners entering the linear model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terms {
    #[default]
    Rules,
    RulesAndLinear,
    LinearOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitConfig {
    pub boost: BoostConfig,
    pub solver: SolverChoice,
    pub terms: Terms,
    /// Standardize attributes before generating rules. On by default.
    pub no_standardize: bool,
}

/// Recorded solver identity in a model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub name: String,
    pub param_name: String,
    pub param: Option<f64>,
}

impl From<&SolverChoice> for SolverMeta {
    fn from(s: &SolverChoice) -> Self {
        let (param_name, param) = s.param();
        SolverMeta {
            name: s.name().to_string(),
            param_name: param_name.to_string(),
            param,
        }
    }
}

/// A binary ensemble. Scores at or above zero predict the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub attribute_names: Vec<String>,
    /// Negative then positive class.
    pub class_names: Vec<String>,
    pub scaling: ScalingParams,
    #[serde(flatten)]
    pub ruleset: RuleSet,
    pub a0: f64,
    pub coefficients: Vec<f64>,
    pub solver: SolverMeta,
    pub loss: LossKind,
    pub seed: u64,
}

impl EnsembleModel {
    pub fn coefficients(&self) -> Coefficients {
        Coefficients {
            intercept: self.a0,
            weights: self.coefficients.clone(),
        }
    }

    pub fn n_attrs(&self) -> usize {
        self.scaling.n_attrs()
    }

    pub fn nonzero_count(&self) -> usize {
        self.coefficients.iter().filter(|&&w| w != 0.0).count()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_attrs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_attrs(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Score of a raw (unscaled) observation.
    pub fn predict_score(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.score_scaled(&self.scaling.transform_row(x)))
    }

    /// Score of an observation already transformed with [`Self::scaling`].
    pub fn score_scaled(&self, x: &[f64]) -> f64 {
        let mut s = self.a0;
        for (a, r) in self.coefficients.iter().zip(&self.ruleset.rules) {
            if *a != 0.0 && r.evaluate(x) {
                s += a;
            }
        }
        let offset = self.ruleset.rules.len();
        for (a, &j) in self.coefficients[offset..].iter().zip(&self.ruleset.linear_terms) {
            s += a * x[j];
        }
        s
    }

    /// `+1` or `-1`; a score of exactly zero predicts `+1`.
    pub fn predict_label(&self, x: &[f64]) -> Result<f64> {
        self.predict_score(x).map(sign_label)
    }

    pub fn predict_scores(&self, d: &Dataset) -> Result<Vec<f64>> {
        (0..d.n_rows()).map(|i| self.predict_score(d.row(i))).collect()
    }
}

/// Sign with ties going to `+1`.
pub fn sign_label(score: f64) -> f64 {
    if score >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Scaled data, rules and feature matrix for one binary task, ready to be
/// fitted by any solver.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub attribute_names: Vec<String>,
    pub class_names: Vec<String>,
    pub scaling: ScalingParams,
    pub ruleset: RuleSet,
    pub features: FeatureMatrix,
    pub labels: Vec<f64>,
    /// Duplicate rules dropped after generation.
    pub duplicates_removed: usize,
    pub loss: LossKind,
    pub seed: u64,
}

impl Prepared {
    /// Standardize (unless disabled), generate and dedupe rules, and build
    /// the feature matrix for `labels` (`±1`, aligned with `d`).
    pub fn new(d: &Dataset, labels: &[f64], class_names: Vec<String>, cfg: &FitConfig) -> Result<Self> {
        let (scaled, scaling) = if cfg.no_standardize {
            (d.clone(), ScalingParams::identity(d.n_attrs()))
        } else {
            standardize(d)
        };
        let (ruleset, duplicates_removed) = match cfg.terms {
            Terms::LinearOnly => {
                if labels.windows(2).all(|w| w[0] == w[1]) {
                    return Err(Error::DegenerateLabels);
                }
                (RuleSet::default().with_linear_terms(d.n_attrs()), 0)
            }
            Terms::Rules | Terms::RulesAndLinear => {
                let generated = generate_rules(&scaled, labels, &cfg.boost)?;
                let (mut rs, removed) = dedupe(&generated);
                if cfg.terms == Terms::RulesAndLinear {
                    rs = rs.with_linear_terms(d.n_attrs());
                }
                (rs, removed)
            }
        };
        let features = build_feature_matrix(&ruleset, &scaled);
        Ok(Prepared {
            attribute_names: d.attribute_names().to_vec(),
            class_names,
            scaling,
            ruleset,
            features,
            labels: labels.to_vec(),
            duplicates_removed,
            loss: cfg.boost.loss,
            seed: cfg.boost.seed,
        })
    }

    pub fn fit(&self, solver: &SolverChoice) -> Result<(EnsembleModel, SolverReport)> {
        let (coefs, report) = solver.fit(&self.features, &self.labels)?;
        Ok((self.model(coefs, solver), report))
    }

    /// Package coefficients over this rule set as a model.
    pub fn model(&self, coefs: Coefficients, solver: &SolverChoice) -> EnsembleModel {
        EnsembleModel {
            attribute_names: self.attribute_names.clone(),
            class_names: self.class_names.clone(),
            scaling: self.scaling.clone(),
            ruleset: self.ruleset.clone(),
            a0: coefs.intercept,
            coefficients: coefs.weights,
            solver: SolverMeta::from(solver),
            loss: self.loss,
            seed: self.seed,
        }
    }
}

/// Fit a two-class dataset; the second declared class is `+1`.
pub fn fit_binary(d: &Dataset, cfg: &FitConfig) -> Result<EnsembleModel> {
    let labels = d.signed_labels()?;
    Prepared::new(d, &labels, d.class_names().to_vec(), cfg)?
        .fit(&cfg.solver)
        .map(|(m, _)| m)
}

/// `J` one-versus-all ensembles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvaModel {
    pub class_names: Vec<String>,
    pub models: Vec<EnsembleModel>,
}

impl OvaModel {
    pub fn predict_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.models.iter().map(|m| m.predict_score(x)).collect()
    }

    /// Class with the largest score, lowest index on ties.
    pub fn predict_class(&self, x: &[f64]) -> Result<usize> {
        self.predict_scores(x).map(|s| argmax(&s))
    }
}

pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (j, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = j;
        }
    }
    best
}

/// Fit one ensemble per class (class `j` against the rest), each with seed
/// `derive_seed(seed, j)`. Submodels train in parallel on the current rayon
/// pool; results do not depend on the pool size.
pub fn fit_ova(d: &Dataset, cfg: &FitConfig) -> Result<OvaModel> {
    let j_total = d.n_classes();
    if j_total < 2 {
        return Err(Error::TooFewClasses(j_total));
    }
    let counts = d.class_counts();
    for (j, &c) in counts.iter().enumerate() {
        if c < 2 {
            return Err(Error::InsufficientClassMembers {
                class: d.class_names()[j].clone(),
                available: c,
                requested: 2,
            });
        }
    }
    let models = (0..j_total)
        .into_par_iter()
        .map(|j| {
            let mut sub = *cfg;
            sub.boost.seed = derive_seed(cfg.boost.seed, j as u64);
            let labels = d.one_vs_all_labels(j);
            let name = &d.class_names()[j];
            let names = vec![format!("not {name}"), name.clone()];
            Prepared::new(d, &labels, names, &sub)?.fit(&sub.solver).map(|(m, _)| m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OvaModel {
        class_names: d.class_names().to_vec(),
        models,
    })
}

/// A fitted classifier: binary for two classes, one-versus-all otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Binary(EnsembleModel),
    Ova(OvaModel),
}

#[derive(Serialize, Deserialize)]
struct Document {
    format_version: u32,
    #[serde(flatten)]
    model: Model,
}

impl Model {
    /// Binary model for two classes, OVA for more.
    pub fn fit(d: &Dataset, cfg: &FitConfig) -> Result<Model> {
        if d.n_classes() == 2 {
            fit_binary(d, cfg).map(Model::Binary)
        } else {
            fit_ova(d, cfg).map(Model::Ova)
        }
    }

    pub fn class_names(&self) -> &[String] {
        match self {
            Model::Binary(m) => &m.class_names,
            Model::Ova(m) => &m.class_names,
        }
    }

    pub fn attribute_names(&self) -> &[String] {
        match self {
            Model::Binary(m) => &m.attribute_names,
            Model::Ova(m) => &m.models[0].attribute_names,
        }
    }

    /// Per-class scores: one score for binary, `J` for OVA.
    pub fn predict_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Model::Binary(m) => m.predict_score(x).map(|s| vec![s]),
            Model::Ova(m) => m.predict_scores(x),
        }
    }

    /// Index into [`Self::class_names`].
    pub fn predict_class(&self, x: &[f64]) -> Result<usize> {
        match self {
            Model::Binary(m) => m.predict_score(x).map(|s| usize::from(s >= 0.0)),
            Model::Ova(m) => m.predict_class(x),
        }
    }

    pub fn predict_classes(&self, d: &Dataset) -> Result<Vec<usize>> {
        (0..d.n_rows()).map(|i| self.predict_class(d.row(i))).collect()
    }

    pub fn to_json(&self) -> String {
        let doc = Document {
            format_version: FORMAT_VERSION,
            model: self.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("models serialize")
    }

    pub fn from_json(text: &str) -> Result<Model> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::param("model document lacks format_version"))?;
        if found != u64::from(FORMAT_VERSION) {
            return Err(Error::UnsupportedVersion {
                found: u32::try_from(found).unwrap_or(u32::MAX),
                supported: FORMAT_VERSION,
            });
        }
        let doc: Document = serde_json::from_value(value)?;
        Ok(doc.model)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Model> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::from_json(&text)
    }
}

/// A single-rule model used by tests and examples.
#[doc(hidden)]
pub fn toy_model(rule: Rule, a0: f64, a1: f64, n_attrs: usize) -> EnsembleModel {
    EnsembleModel {
        attribute_names: (0..n_attrs).map(|j| format!("x{j}")).collect(),
        class_names: vec!["-1".into(), "1".into()],
        scaling: ScalingParams::identity(n_attrs),
        ruleset: RuleSet::new(vec![rule]),
        a0,
        coefficients: vec![a1],
        solver: SolverMeta {
            name: "manual".into(),
            param_name: "none".into(),
            param: None,
        },
        loss: LossKind::SquaredRamp,
        seed: 0,
    }
}
