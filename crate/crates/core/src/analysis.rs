//! Error metrics, coefficient-based rule ranking, voting across solution
//! paths, attribute selection and cross-validation.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{stratified_kfold, Dataset};
use crate::error::{Error, Result};
use crate::model::{EnsembleModel, FitConfig, Model, Prepared, SolverChoice};
use crate::rng::derive_seed;
use crate::rules::RuleSet;
use crate::solvers::{CdConfig, Coefficients, FpcConfig, PathbuildConfig, SpgConfig};

/// Binary confusion counts and rates. Rates whose denominator is empty are
/// `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub n: usize,
    pub true_positives: usize,
    pub true_negatives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub error_rate: f64,
    /// False positives over actual negatives.
    pub fp_rate: Option<f64>,
    /// False negatives over actual positives.
    pub fn_rate: Option<f64>,
}

/// Metrics for `±1` predictions against `±1` labels.
pub fn confusion_metrics(predictions: &[f64], labels: &[f64]) -> Result<Metrics> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::param("no observations to score"));
    }
    let (mut tp, mut tn, mut fp, mut fn_) = (0, 0, 0, 0);
    for (&p, &y) in predictions.iter().zip(labels) {
        match (p > 0.0, y > 0.0) {
            (true, true) => tp += 1,
            (false, false) => tn += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
        }
    }
    let rate = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    Ok(Metrics {
        n: labels.len(),
        true_positives: tp,
        true_negatives: tn,
        false_positives: fp,
        false_negatives: fn_,
        error_rate: (fp + fn_) as f64 / labels.len() as f64,
        fp_rate: rate(fp, fp + tn),
        fn_rate: rate(fn_, fn_ + tp),
    })
}

/// Metrics of class `class` against the rest, from class-index predictions.
pub fn one_vs_all_metrics(predicted: &[usize], truth: &[usize], class: usize) -> Result<Metrics> {
    let to_sign = |v: &[usize]| -> Vec<f64> { v.iter().map(|&c| if c == class { 1.0 } else { -1.0 }).collect() };
    confusion_metrics(&to_sign(predicted), &to_sign(truth))
}

/// A term with its coefficient magnitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedTerm {
    /// Position in the rule set (rules first, then linear terms).
    pub term: usize,
    pub coefficient: f64,
    pub importance: f64,
    pub description: String,
    pub attributes: Vec<usize>,
}

/// Terms ordered by decreasing `|a_k|`, zero coefficients excluded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleRanking {
    /// Fingerprint of the rule set the indices refer to.
    pub universe: u64,
    pub entries: Vec<RankedTerm>,
}

impl RuleRanking {
    pub fn terms(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.term)
    }

    /// Plain-text table with one line per term.
    pub fn to_table(&self) -> String {
        let width = self.entries.iter().map(|e| e.description.len()).max().unwrap_or(4).max(4);
        let mut out = format!("{:>4}  {:<width$}  {:>10}\n", "rank", "rule", "importance");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!("{:>4}  {:<width$}  {:>10.4}\n", i + 1, e.description, e.importance));
        }
        out
    }
}

/// Rank the terms of `ruleset` by the magnitude of `coefs`. Ties go to the
/// lower index.
pub fn rank_coefficients(ruleset: &RuleSet, coefs: &Coefficients, names: &[String], top_k: usize) -> RuleRanking {
    let mut idx: Vec<usize> = (0..coefs.weights.len()).filter(|&k| coefs.weights[k] != 0.0).collect();
    idx.sort_by(|&a, &b| coefs.weights[b].abs().total_cmp(&coefs.weights[a].abs()).then(a.cmp(&b)));
    idx.truncate(top_k);
    RuleRanking {
        universe: ruleset.fingerprint(),
        entries: idx
            .into_iter()
            .map(|k| RankedTerm {
                term: k,
                coefficient: coefs.weights[k],
                importance: coefs.weights[k].abs(),
                description: ruleset.describe_term(k, names),
                attributes: ruleset.term_attributes(k),
            })
            .collect(),
    }
}

/// The `top_k` most important terms of a binary model.
pub fn rank_rules(m: &EnsembleModel, top_k: usize) -> RuleRanking {
    rank_coefficients(&m.ruleset, &m.coefficients(), &m.attribute_names, top_k)
}

/// Number of rankings in which each term appears.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoteTally {
    pub universe: u64,
    /// Rankings counted.
    pub context: usize,
    pub votes: BTreeMap<usize, usize>,
}

impl VoteTally {
    /// Terms with at least `min_votes` votes, in index order.
    pub fn voted(&self, min_votes: usize) -> Vec<usize> {
        self.votes.iter().filter(|(_, &v)| v >= min_votes).map(|(&k, _)| k).collect()
    }

    /// Columns: term, votes, context.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["term", "votes", "context"])?;
        for (k, v) in &self.votes {
            w.write_record([k.to_string(), v.to_string(), self.context.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<tally>", e))
    }
}

/// Count, for every term, the rankings it appears in. All rankings must
/// come from the same rule set.
pub fn vote_rules(rankings: &[RuleRanking]) -> Result<VoteTally> {
    let universe = rankings.first().map_or(0, |r| r.universe);
    if rankings.iter().any(|r| r.universe != universe) {
        return Err(Error::MismatchedRuleUniverse);
    }
    let mut votes = BTreeMap::new();
    for r in rankings {
        let unique: BTreeSet<usize> = r.terms().collect();
        for k in unique {
            *votes.entry(k).or_insert(0) += 1;
        }
    }
    Ok(VoteTally {
        universe,
        context: rankings.len(),
        votes,
    })
}

/// Terms of one repetition's rule set that survived voting.
#[derive(Debug, Clone, PartialEq)]
pub struct VotedTerms {
    pub ruleset: RuleSet,
    pub terms: Vec<usize>,
}

impl VotedTerms {
    /// Attributes constrained by any voted term.
    pub fn attributes(&self) -> BTreeSet<usize> {
        self.terms.iter().flat_map(|&k| self.ruleset.term_attributes(k)).collect()
    }
}

/// Attributes referenced by voted terms in at least `min_votes`
/// repetitions, in index order.
pub fn select_attributes(per_repetition: &[VotedTerms], min_votes: usize) -> Result<Vec<usize>> {
    if min_votes == 0 {
        return Err(Error::param("min_votes must be at least 1"));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for rep in per_repetition {
        for j in rep.attributes() {
            *counts.entry(j).or_insert(0) += 1;
        }
    }
    Ok(counts.into_iter().filter(|&(_, c)| c >= min_votes).map(|(j, _)| j).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CvProtocol {
    pub folds: usize,
    pub repetitions: usize,
    /// Repetition `r` splits with seed `seed + r`.
    pub seed: u64,
}

impl Default for CvProtocol {
    fn default() -> Self {
        CvProtocol {
            folds: 2,
            repetitions: 5,
            seed: 0,
        }
    }
}

/// One train/test evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvRow {
    pub repetition: usize,
    pub fold: usize,
    pub error: f64,
    /// Binary tasks only.
    pub fp_rate: Option<f64>,
    pub fn_rate: Option<f64>,
    /// Nonzero coefficients, summed over submodels.
    pub nonzeros: usize,
    /// One-versus-all metrics per class.
    pub per_class: Vec<Metrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvResult {
    pub class_names: Vec<String>,
    pub rows: Vec<CvRow>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn sample_variance(v: &[f64]) -> Option<f64> {
    let m = mean(v)?;
    (v.len() > 1).then(|| v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl CvResult {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn mean_error(&self) -> f64 {
        mean(&self.errors()).unwrap_or(f64::NAN)
    }

    /// Sample variance of the per-row errors.
    pub fn error_variance(&self) -> Option<f64> {
        sample_variance(&self.errors())
    }

    pub fn mean_fp_rate(&self) -> Option<f64> {
        mean(&self.rows.iter().filter_map(|r| r.fp_rate).collect::<Vec<_>>())
    }

    pub fn mean_fn_rate(&self) -> Option<f64> {
        mean(&self.rows.iter().filter_map(|r| r.fn_rate).collect::<Vec<_>>())
    }

    /// Mean one-versus-all error of each class.
    pub fn per_class_error(&self) -> Vec<f64> {
        (0..self.class_names.len())
            .map(|j| mean(&self.rows.iter().map(|r| r.per_class[j].error_rate).collect::<Vec<_>>()).unwrap_or(f64::NAN))
            .collect()
    }

    /// Columns: repetition, fold, error, fp_rate, fn_rate, nonzeros.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["repetition", "fold", "error", "fp_rate", "fn_rate", "nonzeros"])?;
        for r in &self.rows {
            w.write_record([
                r.repetition.to_string(),
                r.fold.to_string(),
                r.error.to_string(),
                opt(r.fp_rate),
                opt(r.fn_rate),
                r.nonzeros.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<metrics>", e))
    }

    /// Columns: repetition, fold, class, error, fp_rate, fn_rate.
    pub fn write_per_class_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["repetition", "fold", "class", "error", "fp_rate", "fn_rate"])?;
        for r in &self.rows {
            for (j, m) in r.per_class.iter().enumerate() {
                w.write_record([
                    r.repetition.to_string(),
                    r.fold.to_string(),
                    self.class_names[j].clone(),
                    m.error_rate.to_string(),
                    opt(m.fp_rate),
                    opt(m.fn_rate),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io("<metrics>", e))
    }

    /// One line: mean error, its sample variance, mean FP and FN rates.
    pub fn summary(&self) -> String {
        format!(
            "mean_error={:.6} var_error={} mean_fp_rate={} mean_fn_rate={} evaluations={}",
            self.mean_error(),
            self.error_variance().map_or("NA".into(), |v| format!("{v:.6}")),
            self.mean_fp_rate().map_or("NA".into(), |v| format!("{v:.6}")),
            self.mean_fn_rate().map_or("NA".into(), |v| format!("{v:.6}")),
            self.rows.len()
        )
    }
}

/// All (repetition, fold) splits of the protocol, in order.
fn splits(d: &Dataset, protocol: &CvProtocol) -> Result<Vec<(usize, usize, u64, Dataset, Dataset)>> {
    if protocol.repetitions == 0 {
        return Err(Error::param("repetitions must be at least 1"));
    }
    let mut out = Vec::new();
    for r in 0..protocol.repetitions {
        let seed = protocol.seed.wrapping_add(r as u64);
        for (f, fold) in stratified_kfold(d, protocol.folds, seed)?.into_iter().enumerate() {
            let fit_seed = derive_seed(seed, f as u64);
            out.push((r, f, fit_seed, d.subset(fold.train.as_slice()), d.subset(fold.test.as_slice())));
        }
    }
    Ok(out)
}

fn evaluate(model: &Model, test: &Dataset, repetition: usize, fold: usize) -> Result<CvRow> {
    let predicted = model.predict_classes(test)?;
    let truth = test.labels();
    let wrong = predicted.iter().zip(truth).filter(|(p, t)| p != t).count();
    let per_class = (0..test.n_classes())
        .map(|j| one_vs_all_metrics(&predicted, truth, j))
        .collect::<Result<Vec<_>>>()?;
    let (fp_rate, fn_rate) = if test.n_classes() == 2 {
        (per_class[1].fp_rate, per_class[1].fn_rate)
    } else {
        (None, None)
    };
    let nonzeros = match model {
        Model::Binary(m) => m.nonzero_count(),
        Model::Ova(m) => m.models.iter().map(EnsembleModel::nonzero_count).sum(),
    };
    Ok(CvRow {
        repetition,
        fold,
        error: wrong as f64 / test.n_rows() as f64,
        fp_rate,
        fn_rate,
        nonzeros,
        per_class,
    })
}

/// Fit and evaluate on every split of `protocol`. Each fit uses boosting
/// seed `derive_seed(seed + r, fold)`. Splits run in parallel on the
/// current rayon pool; rows come back in (repetition, fold) order.
pub fn run_cv(d: &Dataset, protocol: &CvProtocol, cfg: &FitConfig) -> Result<CvResult> {
    let splits = splits(d, protocol)?;
    let rows = splits
        .into_par_iter()
        .map(|(r, f, seed, train, test)| {
            let mut c = *cfg;
            c.boost.seed = seed;
            let model = Model::fit(&train, &c)?;
            evaluate(&model, &test, r, f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CvResult {
        class_names: d.class_names().to_vec(),
        rows,
    })
}

/// A solver parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Pathbuild threshold.
    Tau,
    /// Elastic-net mixing weight.
    Alpha,
    /// Elastic-net path end point.
    LambdaMin,
    /// FPC path end point.
    MuMax,
    /// SPG L1 radius.
    Sigma,
}

impl SweepParam {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "tau" => SweepParam::Tau,
            "alpha" => SweepParam::Alpha,
            "lambda" | "lambda_min" | "lambda-min" => SweepParam::LambdaMin,
            "mu" | "mu_max" | "mu-max" => SweepParam::MuMax,
            "sigma" => SweepParam::Sigma,
            other => return Err(Error::param(format!("cannot sweep `{other}`; use tau, alpha, lambda_min, mu_max or sigma"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Tau => "tau",
            SweepParam::Alpha => "alpha",
            SweepParam::LambdaMin => "lambda_min",
            SweepParam::MuMax => "mu_max",
            SweepParam::Sigma => "sigma",
        }
    }

    /// `base` with this parameter set to `value`. When `base` is another
    /// solver the swept solver starts from its defaults.
    pub fn apply(self, base: &SolverChoice, value: f64) -> SolverChoice {
        match self {
            SweepParam::Tau => {
                let mut c = match base {
                    SolverChoice::Pathbuild(c) => *c,
                    _ => PathbuildConfig::default(),
                };
                c.tau = value;
                SolverChoice::Pathbuild(c)
            }
            SweepParam::Alpha | SweepParam::LambdaMin => {
                let mut c = match base {
                    SolverChoice::CdElasticNet(c) => *c,
                    _ => CdConfig::default(),
                };
                if self == SweepParam::Alpha {
                    c.alpha = value;
                } else {
                    c.lambda_min = Some(value);
                }
                SolverChoice::CdElasticNet(c)
            }
            SweepParam::MuMax => {
                let mut c = match base {
                    SolverChoice::Fpc(c) => *c,
                    _ => FpcConfig::default(),
                };
                c.mu_max = value;
                SolverChoice::Fpc(c)
            }
            SweepParam::Sigma => {
                let mut c = match base {
                    SolverChoice::SpgLasso(c) => *c,
                    _ => SpgConfig::default(),
                };
                c.sigma = value;
                SolverChoice::SpgLasso(c)
            }
        }
    }
}

/// Aggregates for one grid value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: f64,
    pub mean_error: f64,
    pub error_variance: Option<f64>,
    pub mean_fp_rate: Option<f64>,
    pub mean_fn_rate: Option<f64>,
    pub mean_nonzeros: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param: SweepParam,
    pub points: Vec<SweepPoint>,
    /// Feature-matrix fingerprint of each (repetition, fold) split. Every
    /// grid value on a split is solved on exactly this matrix.
    pub feature_fingerprints: Vec<u64>,
    /// Top-k rankings indexed `[split][grid value]`.
    pub rankings: Vec<Vec<RuleRanking>>,
    /// Rule set of each split.
    pub rulesets: Vec<RuleSet>,
}

impl SweepResult {
    /// Columns: param, mean_error, fp_rate, fn_rate, nonzeros, variance.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([self.param.name(), "mean_error", "fp_rate", "fn_rate", "nonzeros", "variance"])?;
        for p in &self.points {
            w.write_record([
                p.param.to_string(),
                p.mean_error.to_string(),
                opt(p.mean_fp_rate),
                opt(p.mean_fn_rate),
                p.mean_nonzeros.to_string(),
                opt(p.error_variance),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<sweep>", e))
    }
}

/// Evaluate a grid of one solver parameter under a CV protocol. Rules are
/// generated once per split and shared by every grid value. Binary data
/// only. `top_k` sets the size of the recorded rankings.
pub fn sweep(
    d: &Dataset,
    protocol: &CvProtocol,
    cfg: &FitConfig,
    param: SweepParam,
    grid: &[f64],
    top_k: usize,
) -> Result<SweepResult> {
    sweep_splits(d, protocol, cfg, param, grid, top_k, false)
}

fn sweep_splits(
    d: &Dataset,
    protocol: &CvProtocol,
    cfg: &FitConfig,
    param: SweepParam,
    grid: &[f64],
    top_k: usize,
    first_fold_only: bool,
) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::param("empty parameter grid"));
    }
    if d.n_classes() != 2 {
        return Err(Error::param("sweeps need a two-class dataset"));
    }
    let mut splits = splits(d, protocol)?;
    if first_fold_only {
        splits.retain(|s| s.1 == 0);
    }
    type SplitOut = (u64, RuleSet, Vec<(CvRow, RuleRanking)>);
    let per_split: Vec<SplitOut> = splits
        .into_par_iter()
        .map(|(r, f, seed, train, test)| {
            let mut c = *cfg;
            c.boost.seed = seed;
            let labels = train.signed_labels()?;
            let prepared = Prepared::new(&train, &labels, train.class_names().to_vec(), &c)?;
            let fingerprint = prepared.features.fingerprint();
            let outs = grid
                .iter()
                .map(|&v| {
                    let solver = param.apply(&cfg.solver, v);
                    let (m, _) = prepared.fit(&solver)?;
                    let ranking = rank_rules(&m, top_k);
                    Ok((evaluate(&Model::Binary(m), &test, r, f)?, ranking))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((fingerprint, prepared.ruleset, outs))
        })
        .collect::<Result<Vec<_>>>()?;

    let points = grid
        .iter()
        .enumerate()
        .map(|(g, &v)| {
            let rows: Vec<&CvRow> = per_split.iter().map(|s| &s.2[g].0).collect();
            let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
            SweepPoint {
                param: v,
                mean_error: mean(&errors).unwrap_or(f64::NAN),
                error_variance: sample_variance(&errors),
                mean_fp_rate: mean(&rows.iter().filter_map(|r| r.fp_rate).collect::<Vec<_>>()),
                mean_fn_rate: mean(&rows.iter().filter_map(|r| r.fn_rate).collect::<Vec<_>>()),
                mean_nonzeros: rows.iter().map(|r| r.nonzeros as f64).sum::<f64>() / rows.len() as f64,
            }
        })
        .collect();
    let mut feature_fingerprints = Vec::new();
    let mut rankings = Vec::new();
    let mut rulesets = Vec::new();
    for (fp, rs, outs) in per_split {
        feature_fingerprints.push(fp);
        rankings.push(outs.into_iter().map(|(_, rk)| rk).collect());
        rulesets.push(rs);
    }
    Ok(SweepResult {
        param,
        points,
        feature_fingerprints,
        rankings,
        rulesets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SelectionProtocol {
    pub repetitions: usize,
    pub seed: u64,
    /// Terms ranked per solution.
    pub top_k: usize,
    /// Votes across the grid a term needs within a repetition; `None`
    /// requires every grid value.
    pub min_rule_votes: Option<usize>,
    /// Repetitions an attribute must appear in.
    pub min_repetitions: usize,
}

impl Default for SelectionProtocol {
    fn default() -> Self {
        SelectionProtocol {
            repetitions: 5,
            seed: 0,
            top_k: 20,
            min_rule_votes: None,
            min_repetitions: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSelection {
    pub attributes: Vec<usize>,
    pub tallies: Vec<VoteTally>,
    pub voted: Vec<VotedTerms>,
}

/// Two-stage attribute selection. In repetition `r` rules are generated on
/// the training half of a stratified 2-fold split (seed `seed + r`), solved
/// at every grid value, and ranked; terms ranked often enough across the
/// grid are kept. Attributes constrained by kept terms in at least
/// `min_repetitions` repetitions are selected.
pub fn attribute_selection(
    d: &Dataset,
    cfg: &FitConfig,
    param: SweepParam,
    grid: &[f64],
    protocol: &SelectionProtocol,
) -> Result<AttributeSelection> {
    if grid.is_empty() {
        return Err(Error::param("empty parameter grid"));
    }
    if d.n_classes() != 2 {
        return Err(Error::param("attribute selection needs a two-class dataset"));
    }
    let min_rule_votes = protocol.min_rule_votes.unwrap_or(grid.len());
    let result = sweep_splits(
        d,
        &CvProtocol {
            folds: 2,
            repetitions: protocol.repetitions,
            seed: protocol.seed,
        },
        cfg,
        param,
        grid,
        protocol.top_k,
        true,
    )?;
    let mut tallies = Vec::new();
    let mut voted = Vec::new();
    for (rankings, ruleset) in result.rankings.iter().zip(&result.rulesets) {
        let tally = vote_rules(rankings)?;
        voted.push(VotedTerms {
            ruleset: ruleset.clone(),
            terms: tally.voted(min_rule_votes),
        });
        tallies.push(tally);
    }
    Ok(AttributeSelection {
        attributes: select_attributes(&voted, protocol.min_repetitions)?,
        tallies,
        voted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{Interval, Rule};

    #[test]
    fn confusion_examples() {
        let m = confusion_metrics(&[1.0, 1.0, -1.0, -1.0], &[1.0, -1.0, -1.0, -1.0]).unwrap();
        assert_eq!(m.error_rate, 0.25);
        assert_eq!(m.fp_rate, Some(1.0 / 3.0));
        assert_eq!(m.fn_rate, Some(0.0));
        let perfect = confusion_metrics(&[1.0, -1.0], &[1.0, -1.0]).unwrap();
        assert_eq!((perfect.error_rate, perfect.fp_rate, perfect.fn_rate), (0.0, Some(0.0), Some(0.0)));
        let bad = confusion_metrics(&[1.0, 1.0], &[-1.0, -1.0]).unwrap();
        assert_eq!((bad.error_rate, bad.fp_rate, bad.fn_rate), (1.0, Some(1.0), None));
        assert!(confusion_metrics(&[1.0], &[1.0, 1.0]).is_err());
    }

    fn ruleset(n: usize) -> RuleSet {
        RuleSet::new((0..n).map(|k| Rule::from_constraints([(k % 3, Interval::below(k as f64))])).collect())
    }

    #[test]
    fn ranking_order() {
        let rs = ruleset(6);
        let names: Vec<String> = (0..3).map(|j| format!("x{j}")).collect();
        let coefs = Coefficients {
            intercept: 0.0,
            weights: vec![0.0193, -0.1045, 0.0274, 0.0725, -0.0317, 0.0],
        };
        let r = rank_coefficients(&rs, &coefs, &names, 5);
        let mags: Vec<f64> = r.entries.iter().map(|e| e.importance).collect();
        assert_eq!(mags, vec![0.1045, 0.0725, 0.0317, 0.0274, 0.0193]);
        assert_eq!(rank_coefficients(&rs, &coefs, &names, 50).entries.len(), 5);
        assert!(rank_coefficients(&rs, &Coefficients::constant(0.0, 6), &names, 5).entries.is_empty());
        let tied = Coefficients {
            intercept: 0.0,
            weights: vec![0.5, 0.0, -0.5, 0.0, 0.0, 0.0],
        };
        assert_eq!(rank_coefficients(&rs, &tied, &names, 5).terms().collect::<Vec<_>>(), vec![0, 2]);
        assert!(r.to_table().lines().nth(1).unwrap().contains("0.1045"));
    }

    #[test]
    fn voting_and_selection() {
        let rs = ruleset(4);
        let names: Vec<String> = (0..3).map(|j| format!("x{j}")).collect();
        let rank = |w: Vec<f64>| rank_coefficients(&rs, &Coefficients { intercept: 0.0, weights: w }, &names, 2);
        let rankings = vec![
            rank(vec![1.0, 0.5, 0.0, 0.0]),
            rank(vec![1.0, 0.0, 0.5, 0.0]),
            rank(vec![0.0, 1.0, 0.5, 0.0]),
        ];
        let t = vote_rules(&rankings).unwrap();
        assert_eq!(t.votes.get(&0), Some(&2));
        assert_eq!(t.votes.get(&1), Some(&2));
        assert_eq!(t.votes.get(&3), None);
        assert_eq!(t.voted(2), vec![0, 1, 2]);

        let other = rank_coefficients(&ruleset(5), &Coefficients::constant(0.0, 5), &names, 2);
        assert!(matches!(vote_rules(&[rankings[0].clone(), other]), Err(Error::MismatchedRuleUniverse)));

        let rep = |terms: Vec<usize>| VotedTerms { ruleset: rs.clone(), terms };
        // term k constrains attribute k % 3
        let reps = vec![rep(vec![0, 1]), rep(vec![0]), rep(vec![0, 2]), rep(vec![]), rep(vec![1])];
        assert_eq!(select_attributes(&reps, 3).unwrap(), vec![0]);
        assert_eq!(select_attributes(&reps, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn cv_aggregates() {
        let res = CvResult {
            class_names: vec!["a".into(), "b".into()],
            rows: [0.1, 0.2, 0.4]
                .iter()
                .enumerate()
                .map(|(i, &e)| CvRow {
                    repetition: i,
                    fold: 0,
                    error: e,
                    fp_rate: None,
                    fn_rate: Some(e),
                    nonzeros: 1,
                    per_class: vec![],
                })
                .collect(),
        };
        assert_eq!(res.mean_error(), (0.1 + 0.2 + 0.4) / 3.0);
        let m = res.mean_error();
        let var = ((0.1 - m).powi(2) + (0.2 - m).powi(2) + (0.4 - m).powi(2)) / 2.0;
        assert!((res.error_variance().unwrap() - var).abs() < 1e-15);
        assert_eq!(res.mean_fp_rate(), None);
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("repetition,fold,error,fp_rate,fn_rate,nonzeros\n0,0,0.1,,0.1,1\n"));
    }
}
