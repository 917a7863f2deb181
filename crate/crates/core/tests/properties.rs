use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use rfinfer::data::{conditional_permute_feature, default_strata, drop_feature, permute_feature, Dataset};
use rfinfer::experiments::{gen_correlated_null_pair, gen_linear, run_correlated_pair, CorrelatedPairConfig, LinearScenario};
use rfinfer::forest::{fit_forest, ForestParams, Scheme};
use rfinfer::importance::{impurity_importance, oob_permutation_importance, rebuild_importance, RebuildMode};
use rfinfer::inference::{
    chi2_test, confidence_interval, estimate_moments, fit_paired, GroupDesign, Moments, MomentsMeta, Regularization,
    Transform,
};
use rfinfer::stats::{mean, standard_error};
use rfinfer::tree::{fit_tree, Node, TreeParams};

fn linear(n: usize, p: usize, seed: u64) -> Dataset {
    gen_linear(&LinearScenario { n, n_test: 1, p, s: p.min(2), rho: 0.3, snr: 2.0, seed }).0
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn permutation_keeps_multisets_and_response(seed in 0u64..1000, j in 0usize..3) {
        let ds = linear(40, 3, seed);
        let perm = permute_feature(&ds, j, seed + 1).unwrap();
        prop_assert_eq!(sorted(perm.column(j)), sorted(ds.column(j)));
        prop_assert_eq!(perm.response(), ds.response());
        for c in (0..3).filter(|&c| c != j) {
            prop_assert_eq!(perm.column(c), ds.column(c));
        }
        prop_assert_eq!(&perm, &permute_feature(&ds, j, seed + 1).unwrap());
    }

    #[test]
    fn conditional_permutation_keeps_stratum_multisets(seed in 0u64..1000, j in 0usize..3) {
        let ds = linear(60, 3, seed);
        let strata = default_strata(&ds, j, seed).unwrap();
        let perm = conditional_permute_feature(&ds, j, &strata, seed + 1).unwrap();
        let groups = strata.assignment.iter().copied().max().unwrap() + 1;
        for g in 0..groups {
            let pick = |col: &[f64]| -> Vec<f64> {
                sorted(&col.iter().zip(&strata.assignment).filter(|(_, s)| **s == g).map(|(v, _)| *v).collect::<Vec<_>>())
            };
            prop_assert_eq!(pick(perm.column(j)), pick(ds.column(j)));
        }
        prop_assert_eq!(perm.response(), ds.response());
    }

    #[test]
    fn leaves_partition_training_rows(seed in 0u64..1000, min_leaf in 1usize..6) {
        let ds = linear(50, 3, seed);
        let rows: Vec<usize> = (0..ds.n()).collect();
        let tree = fit_tree(&ds, &rows, &TreeParams { min_leaf, seed, ..Default::default() }).unwrap();
        let mut hits = vec![0usize; tree.nodes.len()];
        for &i in &rows {
            hits[tree.leaf_index(&ds.row(i)).unwrap()] += 1;
        }
        for (idx, node) in tree.nodes.iter().enumerate() {
            match node {
                Node::Leaf { count, .. } => {
                    prop_assert_eq!(hits[idx], *count);
                    prop_assert!(*count >= min_leaf || tree.nodes.len() == 1);
                }
                Node::Split { .. } => prop_assert_eq!(hits[idx], 0),
            }
        }
        prop_assert_eq!(hits.iter().sum::<usize>(), ds.n());
    }

    #[test]
    fn full_cart_interpolates_distinct_data(seed in 0u64..1000) {
        let ds = linear(30, 2, seed);
        let rows: Vec<usize> = (0..ds.n()).collect();
        let params = TreeParams { min_leaf: 1, mtry: Some(2), ..Default::default() };
        let tree = fit_tree(&ds, &rows, &params).unwrap();
        for &i in &rows {
            prop_assert_eq!(tree.predict(&ds.row(i)).unwrap(), ds.response()[i]);
        }
    }

    #[test]
    fn random_splits_ignore_the_response(seed in 0u64..1000) {
        let ds = linear(40, 3, seed);
        let shuffled = ds.with_response(ds.response().iter().rev().copied().collect()).unwrap();
        let rows: Vec<usize> = (0..ds.n()).collect();
        let params = TreeParams { random_split_prob: 1.0, min_leaf: 2, seed, ..Default::default() };
        let structure = |ds: &Dataset| -> Vec<Option<(usize, String)>> {
            fit_tree(ds, &rows, &params).unwrap().nodes.iter().map(|n| match n {
                Node::Split { feature, rule, .. } => Some((*feature, format!("{rule:?}"))),
                Node::Leaf { .. } => None,
            }).collect()
        };
        // Constant-response nodes stop early, so compare only trees that
        // see no constant node: all responses here are distinct.
        prop_assert_eq!(structure(&ds), structure(&shuffled));
    }

    #[test]
    fn honest_leaves_ignore_structure_half_responses(seed in 0u64..1000) {
        let ds = linear(60, 3, seed);
        let rows: Vec<usize> = (0..ds.n()).collect();
        let params = TreeParams { honest: true, random_split_prob: 1.0, min_leaf: 3, seed, ..Default::default() };
        let tree = fit_tree(&ds, &rows, &params).unwrap();
        let structure = tree.structure_half.clone().unwrap();
        let mut y = ds.response().to_vec();
        for &i in &structure {
            y[i] += 100.0 + i as f64;
        }
        let again = fit_tree(&ds.with_response(y).unwrap(), &rows, &params).unwrap();
        prop_assert_eq!(tree.nodes.len(), again.nodes.len());
        for (a, b) in tree.nodes.iter().zip(&again.nodes) {
            if let (Node::Leaf { value: va, .. }, Node::Leaf { value: vb, .. }) = (a, b) {
                prop_assert_eq!(va, vb);
            }
        }
    }

    #[test]
    fn forest_is_mean_of_trees_in_any_order(seed in 0u64..1000) {
        let ds = linear(80, 3, seed);
        let mut forest = fit_forest(&ds, &ForestParams { b: 25, seed, ..Default::default() }).unwrap();
        let xs: Vec<Vec<f64>> = linear(10, 3, seed + 1).rows();
        let per_tree = forest.tree_predictions(&xs).unwrap();
        let pred = forest.predict_many(&xs).unwrap();
        for (i, p) in pred.iter().enumerate() {
            let m = per_tree.iter().map(|t| t[i]).sum::<f64>() / per_tree.len() as f64;
            prop_assert!((p - m).abs() <= 1e-12);
        }
        forest.trees.reverse();
        let reversed = forest.predict_many(&xs).unwrap();
        for (a, b) in pred.iter().zip(&reversed) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn subsamples_have_exactly_k_distinct_rows(seed in 0u64..1000, k in 5usize..40) {
        let ds = linear(40, 2, seed);
        let forest = fit_forest(&ds, &ForestParams { b: 10, k: Some(k), scheme: Scheme::Subsample, seed, ..Default::default() }).unwrap();
        for tree in &forest.trees {
            let mut rows = tree.in_sample.clone();
            rows.sort_unstable();
            rows.dedup();
            prop_assert_eq!(rows.len(), k);
        }
    }

    #[test]
    fn covariance_is_symmetric_psd(seed in 0u64..1000) {
        let ds = linear(100, 3, seed);
        let xs = linear(6, 3, seed + 7).rows();
        let params = ForestParams { k: Some(20), seed, ..Default::default() };
        let (_, mom) = estimate_moments(&ds, &params, &xs, GroupDesign::new(5, 4)).unwrap();
        let c = &mom.cov;
        prop_assert!((c - c.transpose()).abs().max() <= 1e-12 * c.abs().max().max(1e-300));
        let eig = SymmetricEigen::new(c.clone()).eigenvalues;
        let top = eig.max();
        prop_assert!(eig.min() >= -1e-8 * top.abs().max(1e-300));
    }

    #[test]
    fn chi2_is_rotation_invariant(seed in 0u64..1000, d in 2usize..7) {
        let mut rng_vals = (0..3 * d * d + d).map(|i| (((seed as usize * 7919 + i * 104729) % 2003) as f64 / 1001.5) - 1.0);
        let a = DMatrix::from_fn(d, d, |_, _| rng_vals.next().unwrap());
        let cov = &a * a.transpose() + DMatrix::identity(d, d) * 0.1;
        let diff: Vec<f64> = (0..d).map(|_| rng_vals.next().unwrap()).collect();
        let r = DMatrix::from_fn(d, d, |_, _| rng_vals.next().unwrap()) + DMatrix::identity(d, d) * 2.0;
        let q = r.qr().q();
        let rd = &q * DVector::from_column_slice(&diff);
        let rc = &q * &cov * q.transpose();
        let t0 = chi2_test(&diff, &cov, Regularization::default()).unwrap();
        let t1 = chi2_test(rd.as_slice(), &rc, Regularization::default()).unwrap();
        prop_assert!((t0.statistic - t1.statistic).abs() <= 1e-8 * t0.statistic.abs().max(1.0));
        prop_assert_eq!(t0.dof, t1.dof);
    }

    #[test]
    fn interval_scales_with_root_variance(m in -10.0f64..10.0, v in 1e-4f64..10.0, level in 0.5f64..0.99) {
        let make = |var: f64| Moments {
            points: vec![vec![0.0]],
            mean: vec![m],
            cov: DMatrix::from_element(1, 1, var),
            meta: MomentsMeta { n: 1, k: 1, n_z: 2, n_mc: 2 },
        };
        let (lo1, hi1) = confidence_interval(&make(v), 0, level).unwrap();
        let (lo2, hi2) = confidence_interval(&make(2.0 * v), 0, level).unwrap();
        let ratio = (hi2 - lo2) / (hi1 - lo1);
        prop_assert!((ratio - 2f64.sqrt()).abs() <= 1e-12);
        prop_assert!(((lo1 + hi1) / 2.0 - m).abs() <= 1e-12 * m.abs().max(1.0));
    }
}

#[test]
fn identical_transform_gives_zero_statistic() {
    let ds = linear(100, 3, 1);
    let xs = linear(5, 3, 2).rows();
    let params = ForestParams { k: Some(20), ..Default::default() };
    let (_, mom) = fit_paired(&ds, &params, &Transform::Permute(vec![]), 3, &xs, GroupDesign::new(5, 4)).unwrap();
    assert!(mom.mean.iter().all(|&d| d == 0.0));
    let t = chi2_test(&mom.mean, &mom.cov, Regularization::default()).unwrap();
    assert_eq!((t.statistic, t.p_value), (0.0, 1.0));
}

#[test]
fn zero_feature_forest_predicts_global_mean() {
    let ds = linear(50, 1, 3);
    let empty = drop_feature(&ds, 0).unwrap();
    let forest = fit_forest(&empty, &ForestParams { b: 5, ..Default::default() }).unwrap();
    let p = forest.predict(&[]).unwrap();
    assert!((p - mean(ds.response())).abs() < 1e-12);
}

#[test]
fn worker_count_does_not_change_models() {
    let ds = linear(200, 4, 5);
    let params = ForestParams { b: 40, seed: 9, tree: TreeParams { random_split_prob: 0.3, ..Default::default() }, ..Default::default() };
    let fit = |w: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(w).build().unwrap().install(|| fit_forest(&ds, &params).unwrap())
    };
    assert_eq!(fit(1).to_json().unwrap(), fit(4).to_json().unwrap());
}

#[test]
fn impurity_scores_sum_to_mean_gain_per_tree() {
    let ds = linear(150, 4, 6);
    let forest = fit_forest(&ds, &ForestParams { b: 30, ..Default::default() }).unwrap();
    let report = impurity_importance(&forest);
    assert!(report.scores.iter().all(|&s| s >= 0.0));
    let total: f64 = forest.trees.iter().map(|t| t.split_gains().iter().sum::<f64>()).sum::<f64>() / 30.0;
    assert!((report.scores.iter().sum::<f64>() - total).abs() <= 1e-9 * total);
}

#[test]
fn unused_feature_has_exactly_zero_oob_importance() {
    let ds = linear(120, 3, 7).with_column(2, vec![1.0; 120]).unwrap();
    let forest = fit_forest(&ds, &ForestParams { b: 30, ..Default::default() }).unwrap();
    assert!(forest.trees.iter().all(|t| !t.split_features().contains(&2)));
    assert_eq!(oob_permutation_importance(&forest, &ds, 1).unwrap().scores[2], 0.0);
}

#[test]
fn rebuild_on_constant_column_is_centred() {
    let sc = LinearScenario { n: 150, n_test: 150, p: 3, s: 2, rho: 0.0, snr: 2.0, seed: 8 };
    let (train, eval) = gen_linear(&sc);
    let train = train.with_column(2, vec![0.5; 150]).unwrap();
    let eval = eval.with_column(2, vec![0.5; 150]).unwrap();
    let scores: Vec<f64> = (0..20)
        .map(|r| {
            let params = ForestParams { b: 30, seed: r, ..Default::default() };
            rebuild_importance(&train, &params, 2, RebuildMode::Permute, &eval, 100 + r).unwrap()
        })
        .collect();
    let m = mean(&scores);
    let se = standard_error(&scores);
    assert!(m.abs() <= 3.0 * se.max(1e-12), "mean {m}, se {se}");
}

#[test]
fn standard_errors_halve_with_four_times_the_runs() {
    let cfg = |runs| CorrelatedPairConfig {
        n: 100,
        runs,
        forest: ForestParams { b: 20, tree: TreeParams { min_leaf: 5, ..Default::default() }, ..Default::default() },
        ..Default::default()
    };
    let small = run_correlated_pair(&cfg(15)).unwrap().summary.drop_x2_se;
    let large = run_correlated_pair(&cfg(60)).unwrap().summary.drop_x2_se;
    let ratio = large / small;
    assert!((0.3..=0.8).contains(&ratio), "ratio {ratio}");
}

#[test]
fn uncorrelated_proxy_scores_like_fresh_noise() {
    // With rho = 0, x2 is pure noise; compare its OOB importance with an
    // appended independent noise column over repeated datasets.
    let diffs: Vec<f64> = (0..40)
        .map(|r| {
            let ds = gen_correlated_null_pair(200, 0.0, r);
            let noise = linear(200, 1, 1000 + r).column(0).to_vec();
            let ds = ds.with_numeric_column("noise", noise).unwrap();
            let forest = fit_forest(&ds, &ForestParams { b: 40, seed: r, ..Default::default() }).unwrap();
            let s = oob_permutation_importance(&forest, &ds, r).unwrap().scores;
            s[1] - s[3]
        })
        .collect();
    let m = mean(&diffs);
    let se = standard_error(&diffs);
    assert!(m.abs() <= 3.0 * se, "mean {m}, se {se}");
}
