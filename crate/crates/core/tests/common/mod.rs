//! Shared helpers for the integration tests and the acceptance binary.

#![allow(dead_code)]

use rand::Rng;
use rfinfer::data::{Dataset, FeatureKind};
use rfinfer::rng::rng_from_seed;
use rfinfer::tree::{Node, SplitRule, Tree, GAIN_TIE_TOL};

/// Tree grown by exhaustive search over every partition of every feature.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleNode {
    Leaf(f64),
    Split {
        feature: usize,
        rule: SplitRule,
        left: Box<OracleNode>,
        right: Box<OracleNode>,
    },
}

fn sse(ys: &[f64]) -> f64 {
    if ys.is_empty() {
        return 0.0;
    }
    let m = ys.iter().sum::<f64>() / ys.len() as f64;
    ys.iter().map(|y| (y - m).powi(2)).sum()
}

fn goes_left(rule: &SplitRule, v: f64) -> bool {
    match rule {
        SplitRule::Threshold(t) => v < *t,
        SplitRule::Levels(l) => l.contains(&(v as u32)),
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

/// Every partition of `rows` by feature `j`, as rules. Categorical subsets
/// always hold the smallest level present.
fn partitions(ds: &Dataset, j: usize, rows: &[usize]) -> Vec<SplitRule> {
    let col = ds.column(j);
    let mut values: Vec<f64> = rows.iter().map(|&i| col[i]).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    match &ds.kinds()[j] {
        FeatureKind::Numeric => values.windows(2).map(|w| SplitRule::Threshold(midpoint(w[0], w[1]))).collect(),
        FeatureKind::Categorical { .. } => {
            let levels: Vec<u32> = values.iter().map(|&v| v as u32).collect();
            let rest = &levels[1..];
            let mut out = Vec::new();
            for mask in 0..(1u32 << rest.len()) {
                if rest.is_empty() || mask == (1u32 << rest.len()) - 1 {
                    continue;
                }
                let mut subset = vec![levels[0]];
                subset.extend(rest.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, l)| *l));
                out.push(SplitRule::Levels(subset));
            }
            out
        }
    }
}

fn rule_less(a: &SplitRule, b: &SplitRule) -> bool {
    match (a, b) {
        (SplitRule::Threshold(x), SplitRule::Threshold(y)) => x < y,
        (SplitRule::Levels(x), SplitRule::Levels(y)) => x < y,
        _ => false,
    }
}

/// Grow the reference tree: split while an admissible partition exists,
/// taking the largest SSE reduction; ties (within the crate's relative
/// tolerance) go to the lowest feature index, then the smallest rule.
pub fn oracle_tree(ds: &Dataset, rows: &[usize], min_leaf: usize, max_depth: Option<usize>) -> OracleNode {
    grow(ds, rows, min_leaf, max_depth, 0)
}

fn grow(ds: &Dataset, rows: &[usize], min_leaf: usize, max_depth: Option<usize>, depth: usize) -> OracleNode {
    let y = ds.response();
    let ys: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
    let leaf = OracleNode::Leaf(ys.iter().sum::<f64>() / ys.len() as f64);
    if max_depth.is_some_and(|d| depth >= d) || rows.len() < 2 * min_leaf || ys.iter().all(|&v| v == ys[0]) {
        return leaf;
    }
    let parent = sse(&ys);
    let tol = GAIN_TIE_TOL * parent;
    let mut cands: Vec<(usize, SplitRule, f64)> = Vec::new();
    for j in 0..ds.p() {
        for rule in partitions(ds, j, rows) {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| goes_left(&rule, ds.value(i, j)));
            if l.len() < min_leaf || r.len() < min_leaf {
                continue;
            }
            let yl: Vec<f64> = l.iter().map(|&i| y[i]).collect();
            let yr: Vec<f64> = r.iter().map(|&i| y[i]).collect();
            cands.push((j, rule, (parent - sse(&yl) - sse(&yr)).max(0.0)));
        }
    }
    let Some(best_gain) = cands.iter().map(|c| c.2).reduce(f64::max) else {
        return leaf;
    };
    let mut winners: Vec<&(usize, SplitRule, f64)> = cands.iter().filter(|c| c.2 >= best_gain - tol).collect();
    let feature = winners.iter().map(|c| c.0).min().expect("nonempty");
    winners.retain(|c| c.0 == feature);
    let mut rule = winners[0].1.clone();
    for c in &winners[1..] {
        if rule_less(&c.1, &rule) {
            rule = c.1.clone();
        }
    }
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| goes_left(&rule, ds.value(i, feature)));
    OracleNode::Split {
        feature,
        rule,
        left: Box::new(grow(ds, &l, min_leaf, max_depth, depth + 1)),
        right: Box::new(grow(ds, &r, min_leaf, max_depth, depth + 1)),
    }
}

/// First disagreement between a fitted tree and the oracle, if any. Leaf
/// values are means computed in different orders, so they are compared to
/// 1e-12 relative; everything else must match exactly.
pub fn compare(tree: &Tree, oracle: &OracleNode) -> Option<String> {
    compare_at(tree, 0, oracle, "root")
}

fn compare_at(tree: &Tree, idx: usize, oracle: &OracleNode, path: &str) -> Option<String> {
    match (&tree.nodes[idx], oracle) {
        (Node::Leaf { value, .. }, OracleNode::Leaf(v)) => {
            ((value - v).abs() > 1e-12 * v.abs().max(1.0)).then(|| format!("{path}: leaf {value} vs {v}"))
        }
        (
            Node::Split { feature, rule, left, right, .. },
            OracleNode::Split { feature: f, rule: r, left: ol, right: or },
        ) => {
            if feature != f || rule != r {
                return Some(format!("{path}: split ({feature}, {rule:?}) vs ({f}, {r:?})"));
            }
            compare_at(tree, *left, ol, &format!("{path}.L")).or_else(|| compare_at(tree, *right, or, &format!("{path}.R")))
        }
        (a, b) => Some(format!("{path}: {a:?} vs {b:?}")),
    }
}

/// Small dataset with heavy ties: integer numeric values in `0..4` or
/// categorical columns with 2 to 4 levels, integer responses in `0..6`.
pub fn tiny_dataset(seed: u64) -> (Dataset, usize, Option<usize>) {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(2..=12);
    let p = rng.random_range(1..=3);
    let mut kinds = Vec::new();
    let mut columns = Vec::new();
    for _ in 0..p {
        if rng.random_bool(0.35) {
            let levels = rng.random_range(2..=4);
            kinds.push(FeatureKind::Categorical { levels: (0..levels).map(|l| format!("l{l}")).collect() });
            columns.push((0..n).map(|_| rng.random_range(0..levels) as f64).collect());
        } else {
            kinds.push(FeatureKind::Numeric);
            columns.push((0..n).map(|_| rng.random_range(0..4) as f64 + if rng.random_bool(0.2) { 0.5 } else { 0.0 }).collect());
        }
    }
    let y = (0..n).map(|_| rng.random_range(0..6) as f64).collect();
    let names = (0..p).map(|j| format!("x{j}")).collect();
    let min_leaf = rng.random_range(1..=3);
    let max_depth = if rng.random_bool(0.3) { Some(rng.random_range(1..=3)) } else { None };
    (Dataset::new(names, kinds, columns, y).expect("valid tiny dataset"), min_leaf, max_depth)
}
