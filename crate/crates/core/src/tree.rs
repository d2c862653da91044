//! CART regression trees grown best-first on boosting targets.
//!
//! Every node except the root doubles as a rule: the conjunction of the
//! split conditions on its path. A tree with `t` leaves therefore yields
//! `2(t - 1)` rules.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::rng::Rng;
use crate::rules::{Interval, Rule};
use rand::Rng as _;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Mean of the exponential distribution of leaf counts.
    pub mean_leaves: f64,
    /// A split is admissible only if both children keep this many rows.
    pub min_node_count: usize,
    /// Nodes whose target variance is below this are not split.
    pub min_impurity: f64,
    /// Fraction of attributes examined at each split.
    pub attr_sample_fraction: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            mean_leaves: 20.0,
            min_node_count: 5,
            min_impurity: 1e-12,
            attr_sample_fraction: 1.0 / 3.0,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.mean_leaves > 1.0) {
            return Err(crate::Error::param("mean_leaves must exceed 1"));
        }
        if self.min_node_count == 0 {
            return Err(crate::Error::param("min_node_count must be at least 1"));
        }
        if !(self.min_impurity >= 0.0) {
            return Err(crate::Error::param("min_impurity must be non-negative"));
        }
        if !(self.attr_sample_fraction > 0.0 && self.attr_sample_fraction <= 1.0) {
            return Err(crate::Error::param("attr_sample_fraction must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Leaf count for the exponential draw `-mean_leaves * ln(u)`, rounded to
/// the nearest integer and floored at 2.
pub fn tree_size_from_uniform(mean_leaves: f64, u: f64) -> usize {
    let draw = -mean_leaves * u.ln();
    (draw.round() as usize).max(2)
}

pub fn sample_tree_size(mean_leaves: f64, rng: &mut Rng) -> usize {
    // gen::<f64>() lies in [0, 1); 1 - u lies in (0, 1]
    let u = 1.0 - rng.random::<f64>();
    tree_size_from_uniform(mean_leaves, u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub attribute: usize,
    pub threshold: f64,
    /// Sum of the children's squared deviations from their means
    /// (count-weighted variance).
    pub impurity_sum: f64,
}

/// Relative slack under which two impurity sums count as tied.
const TIE_EPS: f64 = 1e-12;

#[inline]
pub(crate) fn improves(candidate: f64, best: f64) -> bool {
    candidate < best - TIE_EPS * best.abs().max(1.0)
}

fn sum_sq_dev(targets: impl Iterator<Item = f64> + Clone) -> (usize, f64, f64) {
    let (n, s) = targets.clone().fold((0usize, 0.0), |(n, s), t| (n + 1, s + t));
    if n == 0 {
        return (0, 0.0, 0.0);
    }
    let mean = s / n as f64;
    let ss = targets.map(|t| (t - mean).powi(2)).sum();
    (n, mean, ss)
}

/// Best variance-reducing split of `rows` over `candidate_attrs`.
///
/// `targets[p]` is the target of observation `rows[p]`. Thresholds are
/// midpoints between consecutive distinct values; observations with
/// `x < threshold` go left. Ties go to the lowest attribute index, then the
/// lowest threshold.
pub fn best_split(
    rows: &[usize],
    targets: &[f64],
    candidate_attrs: &[usize],
    data: &Dataset,
    config: &TreeConfig,
) -> Option<Split> {
    assert_eq!(rows.len(), targets.len(), "targets must align with rows");
    let n = rows.len();
    let min_count = config.min_node_count.max(1);
    if n < 2 || n < 2 * min_count {
        return None;
    }
    let (_, _, node_ss) = sum_sq_dev(targets.iter().copied());
    if node_ss / (n as f64) < config.min_impurity || node_ss <= 0.0 {
        return None;
    }

    let mut attrs = candidate_attrs.to_vec();
    attrs.sort_unstable();
    attrs.dedup();

    let total_sum: f64 = targets.iter().sum();
    let total_sq: f64 = targets.iter().map(|t| t * t).sum();
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut best: Option<Split> = None;

    for &attr in &attrs {
        pairs.clear();
        pairs.extend(rows.iter().zip(targets).map(|(&i, &t)| (data.value(i, attr), t)));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for p in 0..n - 1 {
            let (v, t) = pairs[p];
            left_sum += t;
            left_sq += t * t;
            let n_left = p + 1;
            let n_right = n - n_left;
            let next = pairs[p + 1].0;
            if next <= v || n_left < min_count || n_right < min_count {
                continue;
            }
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let ss_left = (left_sq - left_sum * left_sum / n_left as f64).max(0.0);
            let ss_right = (right_sq - right_sum * right_sum / n_right as f64).max(0.0);
            let impurity = ss_left + ss_right;
            if best.is_none_or(|b| improves(impurity, b.impurity_sum)) {
                let mut threshold = 0.5 * (v + next);
                if threshold <= v {
                    threshold = next;
                }
                best = Some(Split {
                    attribute: attr,
                    threshold,
                    impurity_sum: impurity,
                });
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeSplit {
    pub attribute: usize,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub count: usize,
    pub mean: f64,
    /// Target variance within the node.
    pub impurity: f64,
    pub parent: Option<usize>,
    pub split: Option<NodeSplit>,
}

/// A grown regression tree. `nodes[0]` is the root; children are appended
/// in pairs (left, right) in the order splits were made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn terminal_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.split.is_none()).count()
    }

    /// Index of the leaf that `x` is routed to.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut id = 0;
        while let Some(s) = self.nodes[id].split {
            id = if x[s.attribute] < s.threshold { s.left } else { s.right };
        }
        id
    }

    /// Regression prediction: the target mean of the leaf containing `x`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.nodes[self.leaf_index(x)].mean
    }

    /// One rule per non-root node, in node order.
    pub fn rules(&self) -> Vec<Rule> {
        extract_rules(self)
    }
}

/// Path conjunction for every non-root node, intersecting repeated
/// constraints on the same attribute.
pub fn extract_rules(tree: &Tree) -> Vec<Rule> {
    (1..tree.nodes.len())
        .map(|id| {
            let mut rule = Rule::always();
            let mut child = id;
            while let Some(parent) = tree.nodes[child].parent {
                let s = tree.nodes[parent].split.expect("parent nodes are split");
                let interval = if child == s.left {
                    Interval::below(s.threshold)
                } else {
                    Interval::at_least(s.threshold)
                };
                rule.constrain(s.attribute, interval);
                child = parent;
            }
            rule
        })
        .collect()
}

fn node_stats(positions: &[usize], targets: &[f64]) -> (usize, f64, f64) {
    let (n, mean, ss) = sum_sq_dev(positions.iter().map(|&p| targets[p]));
    (n, mean, if n > 0 { ss / n as f64 } else { 0.0 })
}

/// Grow a tree on `rows` (targets aligned with `rows`) until it has
/// `max_leaves` leaves or no leaf can be split.
///
/// Growth is best-first: the open leaf with the largest count-weighted
/// impurity is split next. Each split examines
/// `ceil(attr_sample_fraction * m)` attributes drawn without replacement
/// from the `m` attributes that vary over `rows`.
pub fn grow_tree(
    rows: &[usize],
    targets: &[f64],
    max_leaves: usize,
    data: &Dataset,
    config: &TreeConfig,
    rng: &mut Rng,
) -> Tree {
    assert_eq!(rows.len(), targets.len(), "targets must align with rows");
    let pool: Vec<usize> = (0..data.n_attrs())
        .filter(|&j| {
            let first = rows.first().map(|&i| data.value(i, j));
            rows.iter().any(|&i| Some(data.value(i, j)) != first)
        })
        .collect();
    let n_sampled = ((config.attr_sample_fraction * pool.len() as f64).ceil() as usize)
        .clamp(usize::from(!pool.is_empty()), pool.len());

    let root_positions: Vec<usize> = (0..rows.len()).collect();
    let (count, mean, impurity) = node_stats(&root_positions, targets);
    let mut nodes = vec![TreeNode {
        count,
        mean,
        impurity,
        parent: None,
        split: None,
    }];
    let mut members: Vec<Vec<usize>> = vec![root_positions];
    let mut open: Vec<usize> = if rows.is_empty() { vec![] } else { vec![0] };
    let mut leaves = 1;

    let mut node_rows = Vec::new();
    let mut node_targets = Vec::new();
    while leaves < max_leaves && !open.is_empty() {
        // open leaf with the largest count * variance, lowest id on ties
        let (slot, &id) = open
            .iter()
            .enumerate()
            .max_by(|(_, &a), (_, &b)| {
                let wa = nodes[a].count as f64 * nodes[a].impurity;
                let wb = nodes[b].count as f64 * nodes[b].impurity;
                wa.total_cmp(&wb).then(b.cmp(&a))
            })
            .expect("open is non-empty");
        open.swap_remove(slot);

        let mut candidates: Vec<usize> = rand::seq::index::sample(rng, pool.len(), n_sampled)
            .into_iter()
            .map(|p| pool[p])
            .collect();
        candidates.sort_unstable();

        node_rows.clear();
        node_targets.clear();
        for &p in &members[id] {
            node_rows.push(rows[p]);
            node_targets.push(targets[p]);
        }
        let Some(split) = best_split(&node_rows, &node_targets, &candidates, data, config) else {
            continue;
        };

        let (left_pos, right_pos): (Vec<usize>, Vec<usize>) = members[id]
            .iter()
            .partition(|&&p| data.value(rows[p], split.attribute) < split.threshold);
        let left = nodes.len();
        let right = left + 1;
        for positions in [left_pos, right_pos] {
            let (count, mean, impurity) = node_stats(&positions, targets);
            nodes.push(TreeNode {
                count,
                mean,
                impurity,
                parent: Some(id),
                split: None,
            });
            members.push(positions);
        }
        nodes[id].split = Some(NodeSplit {
            attribute: split.attribute,
            threshold: split.threshold,
            left,
            right,
        });
        members[id] = Vec::new();
        open.push(left);
        open.push(right);
        leaves += 1;
    }
    Tree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn line_data(xs: &[f64]) -> Dataset {
        let labels = vec![0; xs.len()];
        Dataset::new(xs.to_vec(), 1, labels, vec!["x".into()], vec!["a".into(), "b".into()]).unwrap()
    }

    fn loose() -> TreeConfig {
        TreeConfig {
            min_node_count: 1,
            ..TreeConfig::default()
        }
    }

    #[test]
    fn size_from_inverse_cdf() {
        assert_eq!(tree_size_from_uniform(5.0, (-1.0f64).exp()), 5);
        assert_eq!(tree_size_from_uniform(5.0, 1.0 - 1e-12), 2);
        assert_eq!(tree_size_from_uniform(5.0, 1.0), 2);
    }

    #[test]
    fn split_on_step_targets() {
        let d = line_data(&[1.0, 2.0, 3.0, 4.0]);
        let s = best_split(&[0, 1, 2, 3], &[0.0, 0.0, 1.0, 1.0], &[0], &d, &loose()).unwrap();
        assert_eq!(s.attribute, 0);
        assert_eq!(s.threshold, 2.5);
        assert_eq!(s.impurity_sum, 0.0);
    }

    #[test]
    fn no_split_when_pure_or_tiny() {
        let d = line_data(&[1.0, 2.0, 3.0, 4.0]);
        assert!(best_split(&[0, 1, 2, 3], &[1.0; 4], &[0], &d, &loose()).is_none());
        assert!(best_split(&[2], &[1.0], &[0], &d, &loose()).is_none());
        // min_node_count 3 cannot be met by 4 rows
        let cfg = TreeConfig {
            min_node_count: 3,
            ..loose()
        };
        assert!(best_split(&[0, 1, 2, 3], &[0.0, 0.0, 1.0, 1.0], &[0], &d, &cfg).is_none());
    }

    #[test]
    fn minimal_tree_has_two_rules() {
        let d = line_data(&[1.0, 2.0, 3.0, 4.0]);
        let mut rng = rng_from_seed(0);
        let cfg = TreeConfig {
            attr_sample_fraction: 1.0,
            ..loose()
        };
        let tree = grow_tree(&[0, 1, 2, 3], &[0.0, 0.0, 1.0, 1.0], 2, &d, &cfg, &mut rng);
        assert_eq!(tree.terminal_count(), 2);
        let rules = tree.rules();
        assert_eq!(rules.len(), 2);
        assert!(rules[0].evaluate(&[1.5]));
        assert!(!rules[0].evaluate(&[2.5]));
        assert!(rules[1].evaluate(&[2.5]));
        assert_eq!(tree.predict(&[4.0]), 1.0);
    }

    #[test]
    fn three_leaves_four_rules_and_pure_input() {
        let d = line_data(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let mut rng = rng_from_seed(1);
        let cfg = TreeConfig {
            attr_sample_fraction: 1.0,
            ..loose()
        };
        let rows = [0, 1, 2, 3, 4, 5];
        let tree = grow_tree(&rows, &[0.0, 0.0, 1.0, 1.0, 3.0, 3.0], 3, &d, &cfg, &mut rng);
        assert_eq!(tree.terminal_count(), 3);
        assert_eq!(tree.rules().len(), 4);

        let pure = grow_tree(&rows, &[2.0; 6], 5, &d, &cfg, &mut rng);
        assert_eq!(pure.terminal_count(), 1);
        assert!(pure.rules().is_empty());
    }

    #[test]
    fn path_constraints_intersect() {
        // splits x < 2 then x < 1 on the same attribute
        let tree = Tree {
            nodes: vec![
                TreeNode { count: 4, mean: 0.0, impurity: 1.0, parent: None,
                    split: Some(NodeSplit { attribute: 1, threshold: 2.0, left: 1, right: 2 }) },
                TreeNode { count: 2, mean: 0.0, impurity: 1.0, parent: Some(0),
                    split: Some(NodeSplit { attribute: 1, threshold: 1.0, left: 3, right: 4 }) },
                TreeNode { count: 2, mean: 0.0, impurity: 0.0, parent: Some(0), split: None },
                TreeNode { count: 1, mean: 0.0, impurity: 0.0, parent: Some(1), split: None },
                TreeNode { count: 1, mean: 0.0, impurity: 0.0, parent: Some(1), split: None },
            ],
        };
        let rules = extract_rules(&tree);
        assert_eq!(rules.len(), 4);
        let deepest = &rules[2];
        assert_eq!(deepest.constraints().len(), 1);
        assert_eq!(deepest.constraints()[&1], Interval { lo: f64::NEG_INFINITY, hi: 1.0 });
        assert_eq!(rules[3].constraints()[&1], Interval { lo: 1.0, hi: 2.0 });

        let root_only = Tree { nodes: vec![tree.nodes[2].clone()] };
        assert!(extract_rules(&root_only).is_empty());
    }
}
