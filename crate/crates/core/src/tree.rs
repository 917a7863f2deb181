//! CART regression trees.
//!
//! Splits maximize `SSE_parent - SSE_left - SSE_right`. Three departures
//! from plain CART are supported through [`TreeParams`]:
//!
//! * `mtry`: each node evaluates a random subset of features;
//! * `random_split_prob`: with this probability a node picks a uniformly
//!   random admissible split instead of the best one;
//! * `honest`: rows are halved, one half chooses the structure and the
//!   other sets leaf values.
//!
//! Numeric splits send a value left iff it is strictly below the
//! threshold. Categorical splits send a level left iff it is in the stored
//! subset; the subset always contains the smallest level present at the
//! node, so each partition has a single representation.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureKind};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Categorical features with at most this many levels at a node get an
/// exhaustive subset search; larger ones are ordered by mean response.
pub const MAX_SUBSET_LEVELS: usize = 12;

/// Relative tolerance (w.r.t. parent SSE) under which two gains tie.
pub const GAIN_TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    /// `None` grows until the other stopping rules fire.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features drawn per node; `None` means `ceil(p / 3)`.
    pub mtry: Option<usize>,
    pub random_split_prob: f64,
    pub honest: bool,
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_leaf: 5,
            mtry: None,
            random_split_prob: 0.0,
            honest: false,
            seed: 0,
        }
    }
}

impl TreeParams {
    pub fn validate(&self, p: usize) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::InvalidParam("min_leaf must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.random_split_prob) {
            return Err(Error::InvalidParam(format!(
                "random_split_prob {} outside [0, 1]",
                self.random_split_prob
            )));
        }
        if let Some(m) = self.mtry {
            if p > 0 && (m == 0 || m > p) {
                return Err(Error::InvalidParam(format!("mtry {m} outside [1, {p}]")));
            }
        }
        Ok(())
    }

    pub fn resolved_mtry(&self, p: usize) -> usize {
        self.mtry.unwrap_or_else(|| p.div_ceil(3)).min(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    Threshold(f64),
    Levels(Vec<u32>),
}

impl SplitRule {
    #[inline]
    pub fn goes_left(&self, value: f64) -> bool {
        match self {
            SplitRule::Threshold(t) => value < *t,
            SplitRule::Levels(levels) => levels.binary_search(&(value as u32)).is_ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        rule: SplitRule,
        left: usize,
        right: usize,
        gain: f64,
        count: usize,
    },
    Leaf {
        value: f64,
        count: usize,
    },
}

/// A fitted tree. Nodes are stored in preorder; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
    pub in_sample: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_half: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimation_half: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub rule: SplitRule,
    pub gain: f64,
}

impl Tree {
    /// A single leaf predicting `value`.
    pub fn constant(value: f64, n_features: usize, in_sample: Vec<usize>) -> Self {
        let count = in_sample.len();
        Self {
            nodes: vec![Node::Leaf { value, count }],
            n_features,
            in_sample,
            structure_half: None,
            estimation_half: None,
        }
    }

    pub fn leaf_index(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.n_features {
            return Err(Error::ArityMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(self.route(x))
    }

    #[inline]
    fn route(&self, x: &[f64]) -> usize {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { .. } => return idx,
                Node::Split {
                    feature,
                    rule,
                    left,
                    right,
                    ..
                } => idx = if rule.goes_left(x[*feature]) { *left } else { *right },
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let leaf = self.leaf_index(x)?;
        Ok(self.leaf_value(leaf))
    }

    /// Prediction without the arity check, for hot loops over validated input.
    #[inline]
    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        self.leaf_value(self.route(x))
    }

    fn leaf_value(&self, idx: usize) -> f64 {
        match self.nodes[idx] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!("routing ends at a leaf"),
        }
    }

    /// Accumulated split gain per feature.
    pub fn split_gains(&self) -> Vec<f64> {
        let mut gains = vec![0.0; self.n_features];
        for node in &self.nodes {
            if let Node::Split { feature, gain, .. } = node {
                gains[*feature] += gain;
            }
        }
        gains
    }

    pub fn split_features(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

pub fn predict_tree(tree: &Tree, x: &[f64]) -> Result<f64> {
    tree.predict(x)
}

pub fn split_gains(tree: &Tree) -> Vec<f64> {
    tree.split_gains()
}

/// Best split of one feature over the given rows.
///
/// Returns `NoAdmissibleSplit` when no split leaves `min_leaf` rows on both
/// sides. Ties go to the smallest threshold or the lexicographically
/// smallest level subset.
pub fn best_split(
    feature_column: &[f64],
    responses: &[f64],
    kind: &FeatureKind,
    min_leaf: usize,
) -> Result<SplitCandidate> {
    if feature_column.len() != responses.len() {
        return Err(Error::DimensionMismatch {
            vector: feature_column.len(),
            matrix: responses.len(),
        });
    }
    let node = NodeData::new(feature_column.iter().copied().zip(responses.iter().copied()));
    let mut best = BestSplit::new(node.tie_tol);
    node.scan(kind, min_leaf, ScanMode::Greedy, &mut |rule, gain| best.offer(0, rule, gain));
    best.into_candidate().ok_or(Error::NoAdmissibleSplit)
}

/// Feature values and centred responses for the rows of one node.
struct NodeData {
    pairs: Vec<(f64, f64)>,
    constant: bool,
    tie_tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ScanMode {
    Greedy,
    /// Response-free candidate order, used for random splits.
    Blind,
}

impl NodeData {
    fn new(pairs: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut pairs: Vec<(f64, f64)> = pairs.collect();
        let first = pairs.first().map_or(0.0, |p| p.1);
        let constant = pairs.iter().all(|p| p.1 == first);
        let mean = pairs.iter().map(|p| p.1).sum::<f64>() / pairs.len().max(1) as f64;
        for p in &mut pairs {
            p.1 = if constant { 0.0 } else { p.1 - mean };
        }
        let sse: f64 = pairs.iter().map(|p| p.1 * p.1).sum();
        Self {
            pairs,
            constant,
            tie_tol: GAIN_TIE_TOL * sse,
        }
    }

    fn gain(&self, sum_left: f64, n_left: usize, sum_total: f64) -> f64 {
        if self.constant {
            return 0.0;
        }
        let n = self.pairs.len();
        let n_right = n - n_left;
        let sum_right = sum_total - sum_left;
        let g = sum_left * sum_left / n_left as f64 + sum_right * sum_right / n_right as f64
            - sum_total * sum_total / n as f64;
        g.max(0.0)
    }

    /// Visit every admissible split of this feature.
    fn scan(
        &self,
        kind: &FeatureKind,
        min_leaf: usize,
        mode: ScanMode,
        visit: &mut dyn FnMut(SplitRule, f64),
    ) {
        if self.pairs.len() < 2 * min_leaf {
            return;
        }
        match kind {
            FeatureKind::Numeric => self.scan_numeric(min_leaf, visit),
            FeatureKind::Categorical { .. } => self.scan_categorical(min_leaf, mode, visit),
        }
    }

    fn scan_numeric(&self, min_leaf: usize, visit: &mut dyn FnMut(SplitRule, f64)) {
        let mut sorted = self.pairs.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = sorted.iter().map(|p| p.1).sum();
        let n = sorted.len();
        let mut sum_left = 0.0;
        for i in 0..n - 1 {
            sum_left += sorted[i].1;
            let n_left = i + 1;
            let (lo, hi) = (sorted[i].0, sorted[i + 1].0);
            if lo < hi && n_left >= min_leaf && n - n_left >= min_leaf {
                visit(SplitRule::Threshold(midpoint(lo, hi)), self.gain(sum_left, n_left, total));
            }
        }
    }

    fn scan_categorical(&self, min_leaf: usize, mode: ScanMode, visit: &mut dyn FnMut(SplitRule, f64)) {
        let mut stats: Vec<(u32, usize, f64)> = Vec::new();
        {
            let mut codes: Vec<(u32, f64)> = self.pairs.iter().map(|p| (p.0 as u32, p.1)).collect();
            codes.sort_by_key(|c| c.0);
            for (code, y) in codes {
                match stats.last_mut() {
                    Some(last) if last.0 == code => {
                        last.1 += 1;
                        last.2 += y;
                    }
                    _ => stats.push((code, 1, y)),
                }
            }
        }
        let levels = stats.len();
        if levels < 2 {
            return;
        }
        let n = self.pairs.len();
        let total: f64 = stats.iter().map(|s| s.2).sum();
        let smallest = stats[0].0;
        if levels <= MAX_SUBSET_LEVELS {
            let full = (1u32 << (levels - 1)) - 1;
            for mask in 0..full {
                let mut subset = vec![smallest];
                let mut n_left = stats[0].1;
                let mut sum_left = stats[0].2;
                for (b, s) in stats[1..].iter().enumerate() {
                    if mask & (1 << b) != 0 {
                        subset.push(s.0);
                        n_left += s.1;
                        sum_left += s.2;
                    }
                }
                if n_left >= min_leaf && n - n_left >= min_leaf {
                    visit(SplitRule::Levels(subset), self.gain(sum_left, n_left, total));
                }
            }
        } else {
            let mut order: Vec<usize> = (0..levels).collect();
            if mode == ScanMode::Greedy {
                order.sort_by(|&a, &b| {
                    let ma = stats[a].2 / stats[a].1 as f64;
                    let mb = stats[b].2 / stats[b].1 as f64;
                    ma.total_cmp(&mb).then(stats[a].0.cmp(&stats[b].0))
                });
            }
            let mut n_left = 0;
            let mut sum_left = 0.0;
            for r in 0..levels - 1 {
                n_left += stats[order[r]].1;
                sum_left += stats[order[r]].2;
                if n_left < min_leaf || n - n_left < min_leaf {
                    continue;
                }
                let prefix: Vec<u32> = order[..=r].iter().map(|&i| stats[i].0).collect();
                let mut subset: Vec<u32> = if prefix.contains(&smallest) {
                    prefix
                } else {
                    order[r + 1..].iter().map(|&i| stats[i].0).collect()
                };
                subset.sort_unstable();
                visit(SplitRule::Levels(subset), self.gain(sum_left, n_left, total));
            }
        }
    }
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo && mid <= hi {
        mid
    } else {
        hi
    }
}

/// Running arg-max over split candidates with the crate's tie rule.
struct BestSplit {
    tol: f64,
    best: Option<(usize, SplitRule, f64)>,
}

impl BestSplit {
    fn new(tol: f64) -> Self {
        Self { tol, best: None }
    }

    /// Features must be offered in increasing index order.
    fn offer(&mut self, feature: usize, rule: SplitRule, gain: f64) {
        let replace = match &self.best {
            None => true,
            Some((bf, brule, bgain)) => {
                if gain > bgain + self.tol {
                    true
                } else if gain >= bgain - self.tol && feature == *bf {
                    rule_key_less(&rule, brule)
                } else {
                    false
                }
            }
        };
        if replace {
            self.best = Some((feature, rule, gain));
        }
    }

    fn into_candidate(self) -> Option<SplitCandidate> {
        self.best.map(|(_, rule, gain)| SplitCandidate { rule, gain })
    }
}

fn rule_key_less(a: &SplitRule, b: &SplitRule) -> bool {
    match (a, b) {
        (SplitRule::Threshold(x), SplitRule::Threshold(y)) => x < y,
        (SplitRule::Levels(x), SplitRule::Levels(y)) => x < y,
        _ => false,
    }
}

struct Grower<'a> {
    ds: &'a Dataset,
    params: &'a TreeParams,
    mtry: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

/// Fit a tree on `rows` of `ds` (duplicates allowed).
pub fn fit_tree(ds: &Dataset, rows: &[usize], params: &TreeParams) -> Result<Tree> {
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    params.validate(ds.p())?;
    let mut rng = rng_from_seed(params.seed);
    let (structure, estimation) = if params.honest {
        let mut shuffled = rows.to_vec();
        shuffled.shuffle(&mut rng);
        let cut = shuffled.len().div_ceil(2);
        let est = shuffled.split_off(cut);
        (shuffled, Some(est))
    } else {
        (rows.to_vec(), None)
    };
    let mut grower = Grower {
        ds,
        params,
        mtry: params.resolved_mtry(ds.p()),
        rng,
        nodes: Vec::new(),
    };
    let y = ds.response();
    let fallback = match &estimation {
        Some(est) if !est.is_empty() => Leaf::of(est, y),
        _ => Leaf::of(&structure, y),
    };
    grower.grow(&structure, estimation.as_deref(), 0, fallback);
    Ok(Tree {
        nodes: grower.nodes,
        n_features: ds.p(),
        in_sample: rows.to_vec(),
        structure_half: estimation.as_ref().map(|_| structure.clone()),
        estimation_half: estimation,
    })
}

#[derive(Clone, Copy)]
struct Leaf {
    value: f64,
    count: usize,
}

impl Leaf {
    fn of(rows: &[usize], y: &[f64]) -> Self {
        Self {
            value: rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64,
            count: rows.len(),
        }
    }
}

impl Grower<'_> {
    fn grow(&mut self, rows: &[usize], est: Option<&[usize]>, depth: usize, ancestor: Leaf) -> usize {
        let y = self.ds.response();
        let here = match est {
            None => Leaf::of(rows, y),
            Some([]) => ancestor,
            Some(e) => Leaf::of(e, y),
        };
        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: here.value,
            count: here.count,
        });

        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        let min_leaf = self.params.min_leaf;
        if !depth_ok || rows.len() < 2 * min_leaf || self.ds.p() == 0 {
            return idx;
        }
        let first = y[rows[0]];
        if rows.iter().all(|&i| y[i] == first) {
            return idx;
        }
        let Some((feature, split)) = self.choose_split(rows) else {
            return idx;
        };

        let col = self.ds.column(feature);
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&i| split.rule.goes_left(col[i]));
        let (left_est, right_est) = match est {
            Some(e) => {
                let (l, r): (Vec<usize>, Vec<usize>) =
                    e.iter().partition(|&&i| split.rule.goes_left(col[i]));
                (Some(l), Some(r))
            }
            None => (None, None),
        };
        let left = self.grow(&left_rows, left_est.as_deref(), depth + 1, here);
        let right = self.grow(&right_rows, right_est.as_deref(), depth + 1, here);
        self.nodes[idx] = Node::Split {
            feature,
            rule: split.rule,
            left,
            right,
            gain: split.gain,
            count: rows.len(),
        };
        idx
    }

    fn choose_split(&mut self, rows: &[usize]) -> Option<(usize, SplitCandidate)> {
        let p = self.ds.p();
        let mut order: Vec<usize> = (0..p).collect();
        order.shuffle(&mut self.rng);
        let alpha = self.params.random_split_prob;
        let random = if alpha >= 1.0 {
            true
        } else if alpha > 0.0 {
            self.rng.random_bool(alpha)
        } else {
            false
        };
        let min_leaf = self.params.min_leaf;
        let y = self.ds.response();

        let mut taken = self.mtry;
        loop {
            let mut candidates: Vec<usize> = order[..taken].to_vec();
            candidates.sort_unstable();
            let nodes: Vec<NodeData> = candidates
                .iter()
                .map(|&j| {
                    let col = self.ds.column(j);
                    NodeData::new(rows.iter().map(|&i| (col[i], y[i])))
                })
                .collect();
            let found = if random {
                self.pick_random(&candidates, &nodes, min_leaf)
            } else {
                let mut best = BestSplit::new(nodes.first().map_or(0.0, |n| n.tie_tol));
                for (&j, node) in candidates.iter().zip(&nodes) {
                    node.scan(&self.ds.kinds()[j], min_leaf, ScanMode::Greedy, &mut |rule, gain| {
                        best.offer(j, rule, gain)
                    });
                }
                best.best.map(|(j, rule, gain)| (j, SplitCandidate { rule, gain }))
            };
            if found.is_some() || taken == p {
                return found;
            }
            // None of the drawn features can split this node; draw one more.
            taken += 1;
        }
    }

    fn pick_random(
        &mut self,
        candidates: &[usize],
        nodes: &[NodeData],
        min_leaf: usize,
    ) -> Option<(usize, SplitCandidate)> {
        let kinds = self.ds.kinds();
        let counts: Vec<usize> = candidates
            .iter()
            .zip(nodes)
            .map(|(&j, node)| {
                let mut c = 0;
                node.scan(&kinds[j], min_leaf, ScanMode::Blind, &mut |_, _| c += 1);
                c
            })
            .collect();
        let total: usize = counts.iter().sum();
        if total == 0 {
            return None;
        }
        let mut pick = self.rng.random_range(0..total);
        for ((&j, node), &c) in candidates.iter().zip(nodes).zip(&counts) {
            if pick >= c {
                pick -= c;
                continue;
            }
            let mut seen = 0;
            let mut chosen = None;
            node.scan(&kinds[j], min_leaf, ScanMode::Blind, &mut |rule, gain| {
                if seen == pick {
                    chosen = Some(SplitCandidate { rule, gain });
                }
                seen += 1;
            });
            return chosen.map(|c| (j, c));
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_cart() -> TreeParams {
        TreeParams {
            min_leaf: 1,
            mtry: None,
            ..TreeParams::default()
        }
    }

    #[test]
    fn two_point_split() {
        let c = best_split(&[-1.0, 1.0], &[0.0, 1.0], &FeatureKind::Numeric, 1).unwrap();
        assert_eq!(c.rule, SplitRule::Threshold(0.0));
        assert!((c.gain - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_responses_tie_at_smallest_threshold() {
        let c = best_split(&[3.0, 1.0, 2.0, 4.0], &[2.0; 4], &FeatureKind::Numeric, 1).unwrap();
        assert_eq!(c.rule, SplitRule::Threshold(1.5));
        assert_eq!(c.gain, 0.0);
    }

    #[test]
    fn no_admissible_split() {
        let e = best_split(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0], &FeatureKind::Numeric, 1);
        assert!(matches!(e, Err(Error::NoAdmissibleSplit)));
        let e = best_split(&[1.0, 2.0, 3.0], &[0.0, 1.0, 2.0], &FeatureKind::Numeric, 2);
        assert!(matches!(e, Err(Error::NoAdmissibleSplit)));
    }

    #[test]
    fn categorical_subset_split() {
        let kind = FeatureKind::Categorical {
            levels: vec!["a".into(), "b".into(), "c".into()],
        };
        // levels 0 and 2 share a high mean, level 1 is low
        let x = [0.0, 1.0, 2.0, 0.0, 1.0, 2.0];
        let y = [5.0, 0.0, 5.0, 5.0, 0.0, 5.0];
        let c = best_split(&x, &y, &kind, 1).unwrap();
        assert_eq!(c.rule, SplitRule::Levels(vec![0, 2]));
        assert!((c.gain - 100.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn many_level_categorical_uses_mean_order() {
        let levels: Vec<String> = (0..20).map(|i| format!("l{i}")).collect();
        let kind = FeatureKind::Categorical { levels };
        let x: Vec<f64> = (0..40).map(|i| (i % 20) as f64).collect();
        let y: Vec<f64> = (0..40).map(|i| if (i % 20) % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let c = best_split(&x, &y, &kind, 1).unwrap();
        let evens: Vec<u32> = (0..20).step_by(2).collect();
        assert_eq!(c.rule, SplitRule::Levels(evens));
    }

    #[test]
    fn constant_y_gives_single_leaf() {
        let ds = Dataset::from_numeric(vec![(0..10).map(f64::from).collect()], vec![3.5; 10]).unwrap();
        let rows: Vec<usize> = (0..10).collect();
        let tree = fit_tree(&ds, &rows, &params_cart()).unwrap();
        assert_eq!(tree.nodes, vec![Node::Leaf { value: 3.5, count: 10 }]);
    }

    #[test]
    fn step_function_splits_at_zero() {
        let x1: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        let x2: Vec<f64> = (0..8).map(|i| (i / 2) as f64).collect();
        let y: Vec<f64> = x1.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect();
        let ds = Dataset::from_numeric(vec![x1, x2], y).unwrap();
        let rows: Vec<usize> = (0..8).collect();
        let params = TreeParams {
            mtry: Some(2),
            ..params_cart()
        };
        let tree = fit_tree(&ds, &rows, &params).unwrap();
        match &tree.nodes[0] {
            Node::Split { feature, rule, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*rule, SplitRule::Threshold(0.0));
            }
            other => panic!("expected split, got {other:?}"),
        }
        assert_eq!(tree.leaf_count(), 2);
        assert_eq!(tree.predict(&[-1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(tree.predict(&[1.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn min_leaf_equal_to_rows_gives_mean() {
        let ds = Dataset::from_numeric(vec![(0..6).map(f64::from).collect()], (0..6).map(f64::from).collect())
            .unwrap();
        let rows: Vec<usize> = (0..6).collect();
        let tree = fit_tree(&ds, &rows, &TreeParams { min_leaf: 6, ..params_cart() }).unwrap();
        assert_eq!(tree.nodes, vec![Node::Leaf { value: 2.5, count: 6 }]);
    }

    #[test]
    fn threshold_equality_goes_right() {
        let tree = Tree {
            nodes: vec![
                Node::Split {
                    feature: 0,
                    rule: SplitRule::Threshold(1.0),
                    left: 1,
                    right: 2,
                    gain: 1.0,
                    count: 2,
                },
                Node::Leaf { value: -1.0, count: 1 },
                Node::Leaf { value: 1.0, count: 1 },
            ],
            n_features: 1,
            in_sample: vec![0, 1],
            structure_half: None,
            estimation_half: None,
        };
        assert_eq!(tree.predict(&[1.0]).unwrap(), 1.0);
        assert_eq!(tree.predict(&[0.999]).unwrap(), -1.0);
        assert!(matches!(tree.predict(&[1.0, 2.0]), Err(Error::ArityMismatch { .. })));
        assert_eq!(tree.split_gains(), vec![1.0]);
    }

    #[test]
    fn empty_rows_rejected() {
        let ds = Dataset::from_numeric(vec![vec![1.0]], vec![1.0]).unwrap();
        assert!(matches!(fit_tree(&ds, &[], &params_cart()), Err(Error::EmptyRows)));
    }

    #[test]
    fn honest_empty_leaf_falls_back_to_ancestor() {
        // Two rows: structure gets one, estimation the other; no split possible
        // with min_leaf 1 on one structure row, so the root leaf uses the
        // estimation row.
        let ds = Dataset::from_numeric(vec![vec![0.0, 1.0]], vec![10.0, 20.0]).unwrap();
        let params = TreeParams {
            honest: true,
            ..params_cart()
        };
        let tree = fit_tree(&ds, &[0, 1], &params).unwrap();
        let est = tree.estimation_half.as_ref().unwrap();
        assert_eq!(est.len(), 1);
        assert_eq!(tree.nodes, vec![Node::Leaf { value: ds.response()[est[0]], count: 1 }]);
    }

    #[test]
    fn zero_feature_tree_is_constant() {
        let ds = Dataset::from_numeric(vec![], vec![1.0, 3.0]).unwrap();
        let tree = fit_tree(&ds, &[0, 1], &params_cart()).unwrap();
        assert_eq!(tree.predict(&[]).unwrap(), 2.0);
    }

    #[test]
    fn invalid_params() {
        let ds = Dataset::from_numeric(vec![vec![1.0, 2.0]], vec![1.0, 2.0]).unwrap();
        for bad in [
            TreeParams { min_leaf: 0, ..params_cart() },
            TreeParams { mtry: Some(2), ..params_cart() },
            TreeParams { random_split_prob: 1.5, ..params_cart() },
        ] {
            assert!(matches!(fit_tree(&ds, &[0, 1], &bad), Err(Error::InvalidParam(_))));
        }
    }
}
