//! Observation matrices, CSV ingestion, standardization and stratified
//! resampling.
//!
//! A [`Dataset`] stores attributes row-major together with a class index per
//! row. Class names are ordered numerically when every label parses as a
//! number and lexicographically otherwise; for two-class data the first class
//! maps to `-1` and the second to `+1`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n_rows: usize,
    n_attrs: usize,
    labels: Vec<usize>,
    attribute_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    /// Build a dataset from row-major values. `labels[i]` indexes into
    /// `class_names`.
    pub fn new(
        values: Vec<f64>,
        n_attrs: usize,
        labels: Vec<usize>,
        attribute_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if n_attrs == 0 {
            return Err(Error::param("a dataset needs at least one attribute"));
        }
        if labels.is_empty() {
            return Err(Error::param("a dataset needs at least one observation"));
        }
        if values.len() != labels.len() * n_attrs {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * n_attrs,
                found: values.len(),
            });
        }
        if attribute_names.len() != n_attrs {
            return Err(Error::DimensionMismatch {
                expected: n_attrs,
                found: attribute_names.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse {
                row: pos / n_attrs,
                column: attribute_names[pos % n_attrs].clone(),
                value: values[pos].to_string(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&c| c >= class_names.len()) {
            return Err(Error::param(format!(
                "label index {bad} outside {} declared classes",
                class_names.len()
            )));
        }
        Ok(Dataset {
            n_rows: labels.len(),
            values,
            n_attrs,
            labels,
            attribute_names,
            class_names,
        })
    }

    /// Two-class dataset from rows and `±1` labels, with generated names
    /// `x0, x1, ...`.
    pub fn from_signed(rows: &[Vec<f64>], labels: &[f64]) -> Result<Self> {
        let n_attrs = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * n_attrs);
        for row in rows {
            if row.len() != n_attrs {
                return Err(Error::DimensionMismatch {
                    expected: n_attrs,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        let labels = labels
            .iter()
            .map(|&y| match y {
                y if y == -1.0 => Ok(0),
                y if y == 1.0 => Ok(1),
                other => Err(Error::NonBinaryLabel(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(
            values,
            n_attrs,
            labels,
            (0..n_attrs).map(|j| format!("x{j}")).collect(),
            vec!["-1".into(), "1".into()],
        )
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_attrs..(i + 1) * self.n_attrs]
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_attrs + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.value(i, j)).collect()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &c in &self.labels {
            counts[c] += 1;
        }
        counts
    }

    /// Row indices of each class, in ascending order.
    pub fn class_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.n_classes()];
        for (i, &c) in self.labels.iter().enumerate() {
            members[c].push(i);
        }
        members
    }

    /// `±1` labels for a two-class dataset (second class is `+1`).
    pub fn signed_labels(&self) -> Result<Vec<f64>> {
        if self.n_classes() != 2 {
            return Err(Error::param(format!(
                "binary labels requested for a {}-class dataset",
                self.n_classes()
            )));
        }
        Ok(self.one_vs_all_labels(1))
    }

    /// `+1` for members of `class`, `-1` otherwise.
    pub fn one_vs_all_labels(&self, class: usize) -> Vec<f64> {
        self.labels
            .iter()
            .map(|&c| if c == class { 1.0 } else { -1.0 })
            .collect()
    }

    /// Attributes whose values are all identical.
    pub fn constant_attributes(&self) -> Vec<bool> {
        (0..self.n_attrs)
            .map(|j| {
                let first = self.value(0, j);
                (1..self.n_rows).all(|i| self.value(i, j) == first)
            })
            .collect()
    }

    /// Rows at `indices`, in the given order. Class names are kept even if
    /// some class is no longer represented.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(indices.len() * self.n_attrs);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Dataset {
            values,
            n_rows: indices.len(),
            n_attrs: self.n_attrs,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            attribute_names: self.attribute_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Keep only the listed attribute columns, in the given order.
    pub fn select_attributes(&self, attrs: &[usize]) -> Result<Dataset> {
        if attrs.is_empty() {
            return Err(Error::param("attribute selection is empty"));
        }
        if let Some(&bad) = attrs.iter().find(|&&j| j >= self.n_attrs) {
            return Err(Error::param(format!("attribute index {bad} out of range")));
        }
        let mut values = Vec::with_capacity(self.n_rows * attrs.len());
        for i in 0..self.n_rows {
            values.extend(attrs.iter().map(|&j| self.value(i, j)));
        }
        Ok(Dataset {
            values,
            n_rows: self.n_rows,
            n_attrs: attrs.len(),
            labels: self.labels.clone(),
            attribute_names: attrs.iter().map(|&j| self.attribute_names[j].clone()).collect(),
            class_names: self.class_names.clone(),
        })
    }

    fn with_values(&self, values: Vec<f64>) -> Dataset {
        Dataset {
            values,
            ..self.clone()
        }
    }
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

/// Which column of a CSV file holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl LabelColumn {
    /// Header names win; a bare integer that matches no header is a
    /// zero-based index.
    fn resolve(&self, headers: &[String]) -> Result<usize> {
        match self {
            LabelColumn::Index(i) if *i < headers.len() => Ok(*i),
            LabelColumn::Index(i) => Err(Error::UnknownLabelColumn(i.to_string())),
            LabelColumn::Name(name) => {
                if let Some(pos) = headers.iter().position(|h| h == name) {
                    return Ok(pos);
                }
                match name.parse::<usize>() {
                    Ok(i) if i < headers.len() => Ok(i),
                    _ => Err(Error::UnknownLabelColumn(name.clone())),
                }
            }
        }
    }
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(LabelColumn::Name(s.to_string()))
    }
}

impl std::fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
        }
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader)
}

fn parse_cell(cell: &str, line: usize, column: &str) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            row: line,
            column: column.to_string(),
            value: cell.to_string(),
        }),
    }
}

fn order_classes(raw: &[String]) -> Vec<String> {
    let mut distinct: Vec<String> = raw.to_vec();
    distinct.sort();
    distinct.dedup();
    let numeric: Option<Vec<f64>> = distinct.iter().map(|s| s.parse::<f64>().ok()).collect();
    if let Some(keys) = numeric {
        let mut paired: Vec<(f64, String)> = keys.into_iter().zip(distinct).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0));
        paired.into_iter().map(|(_, s)| s).collect()
    } else {
        distinct
    }
}

/// Read a labelled dataset from a comma-delimited file with a header row.
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, label)
}

/// [`load_csv`] over any reader.
pub fn read_csv<R: Read>(reader: R, label: &LabelColumn) -> Result<Dataset> {
    read_labelled(reader, label, None)
}

/// Read a labelled file whose labels are drawn from `class_names`, keeping
/// that class order. Unlike [`load_csv`], a file may hold a single class.
pub fn load_csv_with_classes(path: impl AsRef<Path>, label: &LabelColumn, class_names: &[String]) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_labelled(file, label, Some(class_names))
}

fn read_labelled<R: Read>(reader: R, label: &LabelColumn, known: Option<&[String]>) -> Result<Dataset> {
    let mut rdr = csv_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_idx = label.resolve(&headers)?;
    let attribute_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if attribute_names.is_empty() {
        return Err(Error::EmptyInput("attribute columns"));
    }

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::RaggedRow {
                row: line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                raw_labels.push(cell.to_string());
            } else {
                values.push(parse_cell(cell, line, &headers[j])?);
            }
        }
    }
    if raw_labels.is_empty() {
        return Err(Error::EmptyInput("data rows"));
    }

    let class_names = match known {
        Some(names) => names.to_vec(),
        None => order_classes(&raw_labels),
    };
    if class_names.len() < 2 {
        return Err(Error::TooFewClasses(class_names.len()));
    }
    let index: BTreeMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let labels = raw_labels
        .iter()
        .map(|s| index.get(s.as_str()).copied().ok_or_else(|| Error::UnknownClass(s.clone())))
        .collect::<Result<Vec<_>>>()?;
    let n_attrs = attribute_names.len();
    Dataset::new(values, n_attrs, labels, attribute_names, class_names)
}

/// Read the named attribute columns (any order in the file, other columns
/// ignored) as row-major observations.
pub fn load_observations(path: impl AsRef<Path>, attribute_names: &[String]) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv_reader(file);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let positions = attribute_names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingAttribute(name.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = positions
            .iter()
            .zip(attribute_names)
            .map(|(&p, name)| parse_cell(record.get(p).unwrap_or(""), line, name))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Write a dataset back out as CSV with the label in the last column.
pub fn write_csv<W: std::io::Write>(d: &Dataset, writer: W, label_header: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = d.attribute_names().iter().map(String::as_str).collect();
    header.push(label_header);
    w.write_record(&header)?;
    for i in 0..d.n_rows() {
        let mut rec: Vec<String> = d.row(i).iter().map(|v| v.to_string()).collect();
        rec.push(d.class_names()[d.labels()[i]].clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

/// Per-attribute affine map to zero mean and unit (population) standard
/// deviation. Constant attributes keep `std = 1` and map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl ScalingParams {
    pub fn identity(n_attrs: usize) -> Self {
        ScalingParams {
            means: vec![0.0; n_attrs],
            stds: vec![1.0; n_attrs],
        }
    }

    pub fn n_attrs(&self) -> usize {
        self.means.len()
    }

    pub fn transform_row(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform(&self, d: &Dataset) -> Result<Dataset> {
        if d.n_attrs() != self.n_attrs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_attrs(),
                found: d.n_attrs(),
            });
        }
        let k = d.n_attrs();
        let values = d
            .values()
            .iter()
            .enumerate()
            .map(|(p, v)| (v - self.means[p % k]) / self.stds[p % k])
            .collect();
        Ok(d.with_values(values))
    }
}

/// Standardize every attribute column using statistics of `d` itself.
pub fn standardize(d: &Dataset) -> (Dataset, ScalingParams) {
    let n = d.n_rows() as f64;
    let constant = d.constant_attributes();
    let mut means = Vec::with_capacity(d.n_attrs());
    let mut stds = Vec::with_capacity(d.n_attrs());
    for j in 0..d.n_attrs() {
        if constant[j] {
            // exact value so the column maps to exactly zero
            means.push(d.value(0, j));
            stds.push(1.0);
            continue;
        }
        let mean = (0..d.n_rows()).map(|i| d.value(i, j)).sum::<f64>() / n;
        let var = (0..d.n_rows())
            .map(|i| (d.value(i, j) - mean).powi(2))
            .sum::<f64>()
            / n;
        means.push(mean);
        stds.push(if var > 0.0 { var.sqrt() } else { 1.0 });
    }
    let params = ScalingParams { means, stds };
    let scaled = params.transform(d).expect("dimensions match by construction");
    (scaled, params)
}

// ---------------------------------------------------------------------------
// Index subsets and resampling
// ---------------------------------------------------------------------------

/// Sorted, distinct row indices into a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSubset(Vec<usize>);

impl IndexSubset {
    pub fn new(mut indices: Vec<usize>, n_rows: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("index subset contains duplicates"));
        }
        if indices.last().is_some_and(|&i| i >= n_rows) {
            return Err(Error::param("index subset exceeds dataset size"));
        }
        Ok(IndexSubset(indices))
    }

    pub fn all(n_rows: usize) -> Self {
        IndexSubset((0..n_rows).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

/// Size of the per-tree training subsample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsampleSize {
    Count(usize),
    /// Fraction of the rows available, floored, at least one row.
    Fraction(f64),
}

impl SubsampleSize {
    pub fn resolve(self, n_rows: usize) -> Result<usize> {
        match self {
            SubsampleSize::Count(c) if c >= 1 && c <= n_rows => Ok(c),
            SubsampleSize::Count(c) => Err(Error::param(format!(
                "subsample size {c} outside 1..={n_rows}"
            ))),
            SubsampleSize::Fraction(f) if f > 0.0 && f <= 1.0 => {
                Ok(((f * n_rows as f64).floor() as usize).max(1))
            }
            SubsampleSize::Fraction(f) => Err(Error::param(format!(
                "subsample fraction {f} outside (0, 1]"
            ))),
        }
    }
}

impl std::str::FromStr for SubsampleSize {
    type Err = String;

    /// `"0.25"` is a fraction, `"2500"` a count.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if let Ok(c) = s.parse::<usize>() {
            return Ok(SubsampleSize::Count(c));
        }
        s.parse::<f64>()
            .map(SubsampleSize::Fraction)
            .map_err(|_| format!("`{s}` is neither a row count nor a fraction"))
    }
}

pub(crate) fn sample_rows(rng: &mut Rng, n_rows: usize, count: usize) -> Vec<usize> {
    let mut picked = rand::seq::index::sample(rng, n_rows, count).into_vec();
    picked.sort_unstable();
    picked
}

/// Uniform random subset of `d`'s rows, without replacement.
pub fn subsample(d: &Dataset, eta: SubsampleSize, seed: u64) -> Result<IndexSubset> {
    let count = eta.resolve(d.n_rows())?;
    let mut rng = rng_from_seed(seed);
    Ok(IndexSubset(sample_rows(&mut rng, d.n_rows(), count)))
}

/// Draw exactly `per_class_counts[c]` rows of each class into the training
/// set; the remainder forms the test set.
pub fn stratified_split_indices(
    d: &Dataset,
    per_class_counts: &[usize],
    seed: u64,
) -> Result<(IndexSubset, IndexSubset)> {
    if per_class_counts.len() != d.n_classes() {
        return Err(Error::DimensionMismatch {
            expected: d.n_classes(),
            found: per_class_counts.len(),
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, mut members) in d.class_members().into_iter().enumerate() {
        let want = per_class_counts[c];
        if want > members.len() {
            return Err(Error::InsufficientClassMembers {
                class: d.class_names()[c].clone(),
                available: members.len(),
                requested: want,
            });
        }
        members.shuffle(&mut rng);
        train.extend_from_slice(&members[..want]);
        test.extend_from_slice(&members[want..]);
    }
    Ok((
        IndexSubset::new(train, d.n_rows())?,
        IndexSubset::new(test, d.n_rows())?,
    ))
}

pub fn stratified_split(d: &Dataset, per_class_counts: &[usize], seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = stratified_split_indices(d, per_class_counts, seed)?;
    Ok((d.subset(train.as_slice()), d.subset(test.as_slice())))
}

/// One train/test partition of a cross-validation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: IndexSubset,
    pub test: IndexSubset,
}

/// Stratified k-fold partition. Each class is shuffled and dealt round-robin
/// into the folds, continuing where the previous class stopped, so per-class
/// counts differ by at most one between folds. Fold `i` is the test set of
/// the `i`-th returned pair.
pub fn stratified_kfold(d: &Dataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::param("k-fold cross-validation needs k >= 2"));
    }
    let counts = d.class_counts();
    for (c, &count) in counts.iter().enumerate() {
        if count > 0 && count < k {
            return Err(Error::InsufficientClassMembers {
                class: d.class_names()[c].clone(),
                available: count,
                requested: k,
            });
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut assignment = vec![0usize; d.n_rows()];
    let mut next = 0usize;
    for mut members in d.class_members() {
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok((0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..d.n_rows()).partition(|&i| assignment[i] == f);
            Fold {
                train: IndexSubset(train),
                test: IndexSubset(test),
            }
        })
        .collect())
}
