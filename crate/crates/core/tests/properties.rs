mod common;

use common::*;
use proptest::prelude::*;
use rule_ensemble::analysis::confusion_metrics;
use rule_ensemble::dataset::{stratified_kfold, stratified_split, Dataset};
use rule_ensemble::loss::{loss, pseudo_residual, ramp, LossKind};
use rule_ensemble::model::{argmax, toy_model, Model};
use rule_ensemble::rules::{dedupe, FeatureMatrix, Interval, Rule, RuleSet};
use rule_ensemble::solvers::{project_l1, soft_threshold, PathbuildState};
use rule_ensemble::tree::tree_size_from_uniform;

fn interval() -> impl Strategy<Value = Interval> {
    (-3.0f64..3.0, 0.0f64..3.0, 0u8..4).prop_map(|(lo, width, kind)| match kind {
        0 => Interval::below(lo),
        1 => Interval::at_least(lo),
        2 => Interval { lo, hi: lo + width },
        _ => Interval::UNBOUNDED,
    })
}

fn rule(n_attrs: usize) -> impl Strategy<Value = Rule> {
    prop::collection::vec((0..n_attrs, interval()), 0..4).prop_map(Rule::from_constraints)
}

/// Labels for a small dataset with every class present at least three times.
fn class_labels() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (2usize..5).prop_flat_map(|j| {
        prop::collection::vec(0..j, 4..60).prop_map(move |mut v| {
            for c in 0..j {
                v.extend([c; 3]);
            }
            (j, v)
        })
    })
}

fn labelled(j: usize, labels: Vec<usize>) -> Dataset {
    let n = labels.len();
    Dataset::new(
        (0..n).map(|i| i as f64).collect(),
        1,
        labels,
        vec!["a".into()],
        (0..j).map(|c| format!("c{c}")).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn soft_threshold_satisfies_prox_optimality(z in -20.0f64..20.0, gamma in 0.0f64..10.0) {
        let t = soft_threshold(z, gamma);
        // 0 is in (t - z) + gamma * subdifferential |t|
        if t == 0.0 {
            prop_assert!(z.abs() <= gamma + 1e-12);
        } else {
            prop_assert!(((t - z) + gamma * t.signum()).abs() < 1e-12);
        }
    }

    #[test]
    fn project_l1_is_a_feasible_idempotent_projection(
        v in prop::collection::vec(-10.0f64..10.0, 1..40),
        sigma in 0.0f64..30.0,
    ) {
        let p = project_l1(&v, sigma);
        prop_assert!(p.iter().map(|x| x.abs()).sum::<f64>() <= sigma + 1e-12);
        prop_assert!(max_abs_diff(&project_l1(&p, sigma), &p) < 1e-12);
        prop_assert!(max_abs_diff(&p, &l1_projection_oracle(&v, sigma)) < 1e-10);
        // signs are kept and magnitudes shrink
        for (a, b) in p.iter().zip(&v) {
            prop_assert!(a.abs() <= b.abs() + 1e-15 && a * b >= 0.0);
        }
    }

    #[test]
    fn ramp_loss_and_residual_agree_with_finite_differences(
        y in prop::bool::ANY,
        f in -3.0f64..3.0,
    ) {
        let y = if y { 1.0 } else { -1.0 };
        prop_assert!((-1.0..=1.0).contains(&ramp(f)));
        let h = 1e-6;
        prop_assume!((f.abs() - 1.0).abs() > 10.0 * h);
        for kind in [LossKind::SquaredRamp, LossKind::SquaredError] {
            let fd = -(loss(kind, y, f + h) - loss(kind, y, f - h)) / (2.0 * h);
            prop_assert!((pseudo_residual(kind, y, f) - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn interval_intersection_is_conjunction(a in interval(), b in interval(), x in -4.0f64..4.0) {
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
        prop_assert_eq!(a.intersect(&b).contains(x), a.contains(x) && b.contains(x));
    }

    #[test]
    fn constraining_a_rule_conjoins(r in rule(3), attr in 0usize..3, iv in interval(),
                                    x in prop::collection::vec(-4.0f64..4.0, 3)) {
        let mut tightened = r.clone();
        tightened.constrain(attr, iv);
        prop_assert_eq!(tightened.evaluate(&x), r.evaluate(&x) && iv.contains(x[attr]));
    }

    #[test]
    fn dedupe_removes_exact_duplicates_only(rules in prop::collection::vec(rule(2), 0..12)) {
        let rs = RuleSet::new(rules.clone());
        let (reduced, removed) = dedupe(&rs);
        prop_assert_eq!(reduced.rules.len() + removed, rules.len());
        for (i, a) in reduced.rules.iter().enumerate() {
            for b in &reduced.rules[i + 1..] {
                prop_assert_ne!(a.constraints(), b.constraints());
            }
        }
        for r in &rules {
            prop_assert!(reduced.rules.iter().any(|k| k.constraints() == r.constraints()));
        }
    }

    #[test]
    fn kfold_partitions_and_balances((j, labels) in class_labels(), k in 2usize..4, seed in 0u64..1000) {
        let d = labelled(j, labels);
        let folds = stratified_kfold(&d, k, seed).unwrap();
        let mut seen = vec![0usize; d.n_rows()];
        for f in &folds {
            for &i in f.test.as_slice() {
                seen[i] += 1;
            }
            prop_assert_eq!(f.train.len() + f.test.len(), d.n_rows());
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        for c in 0..j {
            let counts: Vec<usize> = folds.iter().map(|f| d.subset(f.test.as_slice()).class_counts()[c]).collect();
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn stratified_split_takes_exact_counts((j, labels) in class_labels(), seed in 0u64..1000, frac in 0.0f64..1.0) {
        let d = labelled(j, labels);
        let want: Vec<usize> = d.class_counts().iter().map(|&c| (c as f64 * frac) as usize).collect();
        let (train, test) = stratified_split(&d, &want, seed).unwrap();
        prop_assert_eq!(train.class_counts(), want.clone());
        prop_assert_eq!(train.n_rows() + test.n_rows(), d.n_rows());
    }

    #[test]
    fn error_counts_add_up(pairs in prop::collection::vec((prop::bool::ANY, prop::bool::ANY), 1..100)) {
        let s = |b: bool| if b { 1.0 } else { -1.0 };
        let pred: Vec<f64> = pairs.iter().map(|p| s(p.0)).collect();
        let truth: Vec<f64> = pairs.iter().map(|p| s(p.1)).collect();
        let m = confusion_metrics(&pred, &truth).unwrap();
        let wrong = m.false_positives + m.false_negatives;
        prop_assert_eq!((m.error_rate * m.n as f64).round() as usize, wrong);
        prop_assert_eq!(m.error_rate, wrong as f64 / m.n as f64);
        prop_assert_eq!(m.true_positives + m.true_negatives + m.false_positives + m.false_negatives, m.n);
    }

    #[test]
    fn argmax_picks_the_first_maximum(scores in prop::collection::vec(-2.0f64..2.0, 1..8)) {
        let j = argmax(&scores);
        prop_assert!(scores.iter().all(|&s| s <= scores[j]));
        prop_assert!(scores[..j].iter().all(|&s| s < scores[j]));
    }

    #[test]
    fn single_positive_score_wins(j in 0usize..6, n in 6usize..9, pos in 0.01f64..5.0,
                                   neg in prop::collection::vec(-5.0f64..-0.01, 9)) {
        let mut scores = neg[..n].to_vec();
        scores[j] = pos;
        prop_assert_eq!(argmax(&scores), j);
    }

    #[test]
    fn tree_sizes_are_at_least_two(u in 1e-300f64..=1.0, mean in 1.5f64..100.0) {
        prop_assert!(tree_size_from_uniform(mean, u) >= 2);
    }

    #[test]
    fn model_json_round_trips(r in rule(3), a0 in -2.0f64..2.0, a1 in -2.0f64..2.0,
                              x in prop::collection::vec(-5.0f64..5.0, 3)) {
        let m = Model::Binary(toy_model(r, a0, a1, 3));
        let back = Model::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.predict_scores(&x).unwrap(), m.predict_scores(&x).unwrap());
    }

    #[test]
    fn feature_matrix_products_match_row_sums(
        rows in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 4), 1..20),
        a in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let fm = FeatureMatrix::from_rows(&rows).unwrap();
        let direct: Vec<f64> = rows.iter().map(|x| x.iter().zip(&a).map(|(p, q)| p * q).sum()).collect();
        prop_assert!(max_abs_diff(&fm.matvec(&a), &direct) < 1e-12);
        let r: Vec<f64> = (0..rows.len()).map(|i| i as f64 - 1.0).collect();
        let direct_t: Vec<f64> = (0..4).map(|k| rows.iter().zip(&r).map(|(x, w)| x[k] * w).sum()).collect();
        prop_assert!(max_abs_diff(&fm.tmatvec(&r), &direct_t) < 1e-12);
    }

    #[test]
    fn pathbuild_steps_keep_the_gradient_exact(
        seed in 0u64..10_000,
        steps in prop::collection::vec((0usize..6, -0.4f64..0.4), 1..40),
    ) {
        let (fm, y) = indicator_instance(60, 6, seed);
        let mut st = PathbuildState::new(&fm, &y, 0.1).unwrap();
        for (j, d) in steps {
            st.apply_step(&[(j, d)]);
            let w = st.coefficients().weights;
            prop_assert!(max_abs_diff(st.gradient(), &ramp_gradient(&fm, &y, 0.1, &w)) < 1e-9);
            let f = scores(&fm, 0.1, &w);
            prop_assert!(st.indicators().iter().zip(&f).all(|(&v, f)| v == (f.abs() < 1.0)));
        }
    }
}
