//! Rules, rule generation by gradient boosting, and the feature matrix.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dataset::{sample_rows, Dataset, SubsampleSize};
use crate::error::{Error, Result};
use crate::loss::{pseudo_residuals, risk, LossKind};
use crate::rng::{derive_seed, rng_from_seed};
use crate::tree::{grow_tree, sample_tree_size, TreeConfig};

/// Half-open interval `[lo, hi)`. Either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "bound")]
    pub lo: f64,
    #[serde(with = "bound")]
    pub hi: f64,
}

impl Interval {
    pub const UNBOUNDED: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn below(hi: f64) -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi,
        }
    }

    pub fn at_least(lo: f64) -> Self {
        Interval {
            lo,
            hi: f64::INFINITY,
        }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }
}

/// Infinite bounds travel as the strings `"-inf"` and `"inf"`.
mod bound {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Sentinel(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else if *v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Finite(v) => Ok(v),
            Repr::Sentinel(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Sentinel(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Sentinel(s) => Err(serde::de::Error::custom(format!("bad interval bound `{s}`"))),
        }
    }
}

/// Conjunction of interval constraints, at most one per attribute.
/// A rule with no constraints is true everywhere.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Rule {
    constraints: BTreeMap<usize, Interval>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintRepr {
    attr: usize,
    #[serde(with = "bound")]
    lo: f64,
    #[serde(with = "bound")]
    hi: f64,
}

#[derive(Serialize, Deserialize)]
struct RuleRepr {
    constraints: Vec<ConstraintRepr>,
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RuleRepr {
            constraints: self
                .constraints
                .iter()
                .map(|(&attr, iv)| ConstraintRepr {
                    attr,
                    lo: iv.lo,
                    hi: iv.hi,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RuleRepr::deserialize(d)?;
        let mut rule = Rule::always();
        for c in repr.constraints {
            // an empty interval is a rule that never fires, so only NaN is malformed
            if c.lo.is_nan() || c.hi.is_nan() {
                return Err(serde::de::Error::custom(format!("NaN bound on attribute {}", c.attr)));
            }
            rule.constrain(c.attr, Interval { lo: c.lo, hi: c.hi });
        }
        Ok(rule)
    }
}

impl Rule {
    /// The rule with no constraints.
    pub fn always() -> Self {
        Rule::default()
    }

    pub fn from_constraints(constraints: impl IntoIterator<Item = (usize, Interval)>) -> Self {
        let mut rule = Rule::always();
        for (attr, iv) in constraints {
            rule.constrain(attr, iv);
        }
        rule
    }

    /// Add a constraint, intersecting with any existing one on `attr`.
    pub fn constrain(&mut self, attr: usize, interval: Interval) {
        self.constraints
            .entry(attr)
            .and_modify(|iv| *iv = iv.intersect(&interval))
            .or_insert(interval);
    }

    pub fn constraints(&self) -> &BTreeMap<usize, Interval> {
        &self.constraints
    }

    pub fn attributes(&self) -> impl Iterator<Item = usize> + '_ {
        self.constraints.keys().copied()
    }

    #[inline]
    pub fn evaluate(&self, x: &[f64]) -> bool {
        self.constraints.iter().all(|(&j, iv)| iv.contains(x[j]))
    }

    /// Human-readable form such as `x2 >= -0.315 & x18 >= 0.047`.
    pub fn describe(&self, names: &[String]) -> String {
        if self.constraints.is_empty() {
            return "(always)".to_string();
        }
        let mut out = String::new();
        for (n, (&j, iv)) in self.constraints.iter().enumerate() {
            if n > 0 {
                out.push_str(" & ");
            }
            let name = names.get(j).cloned().unwrap_or_else(|| format!("x{j}"));
            match (iv.lo.is_finite(), iv.hi.is_finite()) {
                (true, true) => write!(out, "{:.3} <= {name} < {:.3}", iv.lo, iv.hi),
                (true, false) => write!(out, "{name} >= {:.3}", iv.lo),
                (false, true) => write!(out, "{name} < {:.3}", iv.hi),
                (false, false) => write!(out, "{name} unconstrained"),
            }
            .expect("writing to a String");
        }
        out
    }

    fn key(&self) -> Vec<(usize, u64, u64)> {
        self.constraints
            .iter()
            .map(|(&j, iv)| (j, iv.lo.to_bits(), iv.hi.to_bits()))
            .collect()
    }
}

/// Generated rules plus optional linear terms. Terms are ordered rules
/// first, then linear terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub linear_terms: Vec<usize>,
}

/// A base learner of the ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermRef<'a> {
    Rule(&'a Rule),
    Linear(usize),
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Self {
        RuleSet {
            rules,
            linear_terms: Vec::new(),
        }
    }

    /// Append one linear term per attribute.
    pub fn with_linear_terms(mut self, n_attrs: usize) -> Self {
        self.linear_terms = (0..n_attrs).collect();
        self
    }

    pub fn n_terms(&self) -> usize {
        self.rules.len() + self.linear_terms.len()
    }

    pub fn term(&self, k: usize) -> TermRef<'_> {
        if k < self.rules.len() {
            TermRef::Rule(&self.rules[k])
        } else {
            TermRef::Linear(self.linear_terms[k - self.rules.len()])
        }
    }

    /// Attributes referenced by term `k`.
    pub fn term_attributes(&self, k: usize) -> Vec<usize> {
        match self.term(k) {
            TermRef::Rule(r) => r.attributes().collect(),
            TermRef::Linear(j) => vec![j],
        }
    }

    pub fn describe_term(&self, k: usize, names: &[String]) -> String {
        match self.term(k) {
            TermRef::Rule(r) => r.describe(names),
            TermRef::Linear(j) => names.get(j).cloned().unwrap_or_else(|| format!("x{j}")),
        }
    }

    /// Term values for one (already scaled) observation.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        self.rules
            .iter()
            .map(|r| if r.evaluate(x) { 1.0 } else { 0.0 })
            .chain(self.linear_terms.iter().map(|&j| x[j]))
            .collect()
    }

    /// Stable 64-bit fingerprint of the term list.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        h.write_u64(self.rules.len() as u64);
        for r in &self.rules {
            h.write_u64(r.constraints.len() as u64);
            for (j, lo, hi) in r.key() {
                h.write_u64(j as u64);
                h.write_u64(lo);
                h.write_u64(hi);
            }
        }
        h.write_u64(self.linear_terms.len() as u64);
        for &j in &self.linear_terms {
            h.write_u64(j as u64);
        }
        h.finish()
    }
}

/// FNV-1a, used for fingerprints that must not change between builds.
pub(crate) struct Fnv(u64);

impl Fnv {
    pub(crate) fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

/// Remove rules with identical constraint maps, keeping the first.
/// Returns the reduced set and the number of rules removed.
pub fn dedupe(rs: &RuleSet) -> (RuleSet, usize) {
    let mut seen = HashSet::new();
    let rules: Vec<Rule> = rs.rules.iter().filter(|r| seen.insert(r.key())).cloned().collect();
    let removed = rs.rules.len() - rules.len();
    (
        RuleSet {
            rules,
            linear_terms: rs.linear_terms.clone(),
        },
        removed,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub max_rules: usize,
    /// Hard cap on boosting iterations, for inputs where trees stop
    /// producing rules.
    pub max_trees: usize,
    pub eta: SubsampleSize,
    pub nu: f64,
    pub residual_tolerance: f64,
    pub tree: TreeConfig,
    pub loss: LossKind,
    pub seed: u64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            max_rules: 600,
            max_trees: 10_000,
            eta: SubsampleSize::Fraction(0.25),
            nu: 0.01,
            residual_tolerance: 1e-6,
            tree: TreeConfig::default(),
            loss: LossKind::SquaredRamp,
            seed: 0,
        }
    }
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_rules == 0 {
            return Err(Error::param("max_rules must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::param("nu must lie in [0, 1]"));
        }
        if !(self.residual_tolerance >= 0.0) {
            return Err(Error::param("residual_tolerance must be non-negative"));
        }
        self.tree.validate()
    }
}

/// Per-iteration record of a boosting run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoostTrace {
    /// Leaf count drawn for each tree.
    pub tree_sizes: Vec<usize>,
    /// Rules contributed by each tree after truncation.
    pub rules_per_tree: Vec<usize>,
    /// Training risk of the memory function, starting with the constant.
    pub memory_risk: Vec<f64>,
}

fn check_labels(loss: LossKind, labels: &[f64]) -> Result<()> {
    if loss == LossKind::SquaredRamp {
        if let Some(&bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::NonBinaryLabel(bad));
        }
    }
    if let Some(&bad) = labels.iter().find(|y| !y.is_finite()) {
        return Err(Error::NonBinaryLabel(bad));
    }
    if labels.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateLabels);
    }
    Ok(())
}

/// Boost regression trees on pseudo residuals and collect their node rules.
///
/// `labels` are the targets aligned with the rows of `data` (`±1` for the
/// ramp loss).
pub fn generate_rules(data: &Dataset, labels: &[f64], cfg: &BoostConfig) -> Result<RuleSet> {
    generate_rules_traced(data, labels, cfg).map(|(rs, _)| rs)
}

pub fn generate_rules_traced(data: &Dataset, labels: &[f64], cfg: &BoostConfig) -> Result<(RuleSet, BoostTrace)> {
    cfg.validate()?;
    let n = data.n_rows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    check_labels(cfg.loss, labels)?;
    let sub_size = cfg.eta.resolve(n)?;

    let f0 = cfg.loss.optimal_constant(labels);
    let mut memory = vec![f0; n];
    let mut trace = BoostTrace {
        memory_risk: vec![risk(cfg.loss, labels, &memory)?],
        ..BoostTrace::default()
    };
    let mut rules: Vec<Rule> = Vec::with_capacity(cfg.max_rules);
    let mut sub_labels = Vec::with_capacity(sub_size);
    let mut sub_memory = Vec::with_capacity(sub_size);

    for m in 0..cfg.max_trees {
        if rules.len() >= cfg.max_rules {
            break;
        }
        let mut rng = rng_from_seed(derive_seed(cfg.seed, m as u64));
        let rows = sample_rows(&mut rng, n, sub_size);
        let t_m = sample_tree_size(cfg.tree.mean_leaves, &mut rng);

        sub_labels.clear();
        sub_memory.clear();
        for &i in &rows {
            sub_labels.push(labels[i]);
            sub_memory.push(memory[i]);
        }
        let residuals = pseudo_residuals(cfg.loss, &sub_labels, &sub_memory)?;
        let max_abs = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        if max_abs < cfg.residual_tolerance {
            break;
        }

        let tree = grow_tree(&rows, &residuals, t_m, data, &cfg.tree, &mut rng);
        let mut tree_rules = tree.rules();
        tree_rules.truncate(cfg.max_rules - rules.len());
        trace.tree_sizes.push(t_m);
        trace.rules_per_tree.push(tree_rules.len());
        rules.extend(tree_rules);

        if cfg.nu > 0.0 {
            for (i, f) in memory.iter_mut().enumerate() {
                *f += cfg.nu * tree.predict(data.row(i));
            }
        }
        trace.memory_risk.push(risk(cfg.loss, labels, &memory)?);
    }

    if rules.is_empty() {
        return Err(Error::EmptyRuleSet);
    }
    Ok((RuleSet::new(rules), trace))
}

/// Dense column-major `N x K` matrix of term evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_columns(n_rows: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        let n_cols = columns.len();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for c in columns {
            if c.len() != n_rows {
                return Err(Error::DimensionMismatch {
                    expected: n_rows,
                    found: c.len(),
                });
            }
            data.extend(c);
        }
        Ok(FeatureMatrix { n_rows, n_cols, data })
    }

    /// Build from row-major rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = vec![0.0; n_rows * n_cols];
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: r.len(),
                });
            }
            for (k, &v) in r.iter().enumerate() {
                data[k * n_rows + i] = v;
            }
        }
        Ok(FeatureMatrix { n_rows, n_cols, data })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn column(&self, k: usize) -> &[f64] {
        &self.data[k * self.n_rows..(k + 1) * self.n_rows]
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[k * self.n_rows + i]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n_cols).map(|k| self.get(i, k)).collect()
    }

    /// `X a`.
    pub fn matvec(&self, a: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows];
        for (k, &ak) in a.iter().enumerate() {
            if ak != 0.0 {
                for (o, &x) in out.iter_mut().zip(self.column(k)) {
                    *o += ak * x;
                }
            }
        }
        out
    }

    /// `X^T r`.
    pub fn tmatvec(&self, r: &[f64]) -> Vec<f64> {
        (0..self.n_cols).map(|k| dot(self.column(k), r)).collect()
    }

    /// Fraction of nonzero entries in column `k`; for a rule column this
    /// is the rule's support.
    pub fn support(&self, k: usize) -> f64 {
        let nz = self.column(k).iter().filter(|&&v| v != 0.0).count();
        nz as f64 / self.n_rows.max(1) as f64
    }

    /// Stable fingerprint of the matrix contents.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        h.write_u64(self.n_rows as u64);
        h.write_u64(self.n_cols as u64);
        for v in &self.data {
            h.write_u64(v.to_bits());
        }
        h.finish()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Evaluate every term of `rs` on every row of `d`. Linear columns take the
/// attribute values of `d` as given.
pub fn build_feature_matrix(rs: &RuleSet, d: &Dataset) -> FeatureMatrix {
    let n = d.n_rows();
    let mut data = Vec::with_capacity(n * rs.n_terms());
    for r in &rs.rules {
        data.extend((0..n).map(|i| if r.evaluate(d.row(i)) { 1.0 } else { 0.0 }));
    }
    for &j in &rs.linear_terms {
        data.extend((0..n).map(|i| d.value(i, j)));
    }
    FeatureMatrix {
        n_rows: n,
        n_cols: rs.n_terms(),
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_rule() -> Rule {
        Rule::from_constraints([(2, Interval::at_least(-0.315)), (18, Interval::at_least(0.047))])
    }

    #[test]
    fn evaluates_conjunctions() {
        let mut x = vec![0.0; 20];
        x[18] = 0.1;
        assert!(table_rule().evaluate(&x));
        x[2] = -1.0;
        assert!(!table_rule().evaluate(&x));
        assert!(Rule::always().evaluate(&x));
    }

    #[test]
    fn description() {
        let names: Vec<String> = (0..20).map(|j| format!("x{j}")).collect();
        assert_eq!(table_rule().describe(&names), "x2 >= -0.315 & x18 >= 0.047");
        let two_sided = Rule::from_constraints([(1, Interval { lo: -0.5, hi: 0.25 })]);
        assert_eq!(two_sided.describe(&names), "-0.500 <= x1 < 0.250");
    }

    #[test]
    fn dedupe_keeps_first() {
        let a = Rule::from_constraints([(0, Interval::below(1.0))]);
        let b = Rule::from_constraints([(0, Interval::below(2.0))]);
        let (rs, removed) = dedupe(&RuleSet::new(vec![a.clone(), b.clone(), a.clone()]));
        assert_eq!(removed, 1);
        assert_eq!(rs.rules, vec![a, b]);
        let (empty, removed) = dedupe(&RuleSet::default());
        assert!(empty.rules.is_empty());
        assert_eq!(removed, 0);
    }

    #[test]
    fn feature_columns() {
        let d = Dataset::from_signed(&[vec![0.0, -1.0], vec![5.0, 0.0], vec![0.5, 1.0]], &[1.0, -1.0, 1.0]).unwrap();
        let rs = RuleSet::new(vec![
            Rule::from_constraints([(0, Interval::below(1.0))]),
            Rule::always(),
        ])
        .with_linear_terms(2);
        let fm = build_feature_matrix(&rs, &d);
        assert_eq!(fm.column(0), &[1.0, 0.0, 1.0]);
        assert_eq!(fm.column(1), &[1.0, 1.0, 1.0]);
        assert_eq!(fm.column(3), &[-1.0, 0.0, 1.0]);
        assert_eq!(fm.n_cols(), 4);
        assert!((fm.support(0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(rs.evaluate(d.row(1)), fm.row(1));
    }

    #[test]
    fn rule_json_uses_sentinels() {
        let json = serde_json::to_string(&table_rule()).unwrap();
        assert_eq!(
            json,
            r#"{"constraints":[{"attr":2,"lo":-0.315,"hi":"inf"},{"attr":18,"lo":0.047,"hi":"inf"}]}"#
        );
        let back: Rule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, table_rule());
        assert!(serde_json::from_str::<Rule>(r#"{"constraints":[{"attr":0,"lo":"nan","hi":1}]}"#).is_err());
    }

    fn xor_data(n: usize) -> (Dataset, Vec<f64>) {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![(i % 7) as f64 / 7.0, (i % 11) as f64 / 11.0, ((i * 13) % 17) as f64])
            .collect();
        let labels: Vec<f64> = rows
            .iter()
            .map(|r| if (r[0] > 0.5) != (r[1] > 0.5) { 1.0 } else { -1.0 })
            .collect();
        (Dataset::from_signed(&rows, &labels).unwrap(), labels)
    }

    #[test]
    fn rule_cap_truncates_last_tree() {
        let (d, y) = xor_data(200);
        let cfg = BoostConfig {
            max_rules: 5,
            ..BoostConfig::default()
        };
        let (rs, trace) = generate_rules_traced(&d, &y, &cfg).unwrap();
        assert_eq!(rs.rules.len(), 5);
        assert_eq!(trace.rules_per_tree.iter().sum::<usize>(), 5);
        for r in &rs.rules {
            assert!(r.attributes().all(|j| j < d.n_attrs()));
        }
    }

    #[test]
    fn deterministic_and_degenerate_cases() {
        let (d, y) = xor_data(200);
        let cfg = BoostConfig {
            max_rules: 40,
            seed: 9,
            ..BoostConfig::default()
        };
        assert_eq!(generate_rules(&d, &y, &cfg).unwrap(), generate_rules(&d, &y, &cfg).unwrap());

        let inf = BoostConfig {
            residual_tolerance: f64::INFINITY,
            ..cfg
        };
        assert!(matches!(generate_rules(&d, &y, &inf), Err(Error::EmptyRuleSet)));
        assert!(matches!(generate_rules(&d, &vec![1.0; 200], &cfg), Err(Error::DegenerateLabels)));
        assert!(matches!(generate_rules(&d, &vec![0.5; 200], &cfg), Err(Error::NonBinaryLabel(_))));
    }
}
