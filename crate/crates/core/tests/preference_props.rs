mod common;

use approx::assert_relative_eq;
use common::Reference;
use manyarm::preference::{set_probability, PreferenceSpace, SimilarityRow};
use manyarm::selection::{utility, UtilityModel};
use manyarm::ArmId;
use proptest::prelude::*;

fn row_strategy(max_n: usize) -> impl Strategy<Value = (Vec<f64>, f64)> {
    (prop::collection::vec(-0.3f64..1.0, 2..max_n), 0.0f64..1.0)
        .prop_filter("needs positive mass", |(s, _)| s.iter().any(|&x| x > 1e-6))
}

fn space(scores: &[f64], eps: f64) -> PreferenceSpace {
    let row = SimilarityRow::new(0, (1..=scores.len() as ArmId).collect(), scores.to_vec());
    PreferenceSpace::new(row, eps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn joint_is_symmetric_and_matches_reference((scores, eps) in row_strategy(40)) {
        let sp = space(&scores, eps);
        let r = Reference::new(&scores, eps);
        for j in 0..scores.len() {
            for k in (j + 1)..scores.len() {
                let a = sp.joint(j, k).unwrap();
                prop_assert_eq!(a, sp.joint(k, j).unwrap());
                prop_assert!(a >= 0.0);
                prop_assert!((a - r.joint(j, k)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn marginals_sum_to_one((scores, eps) in row_strategy(400)) {
        let sp = space(&scores, eps);
        let total: f64 = sp.marginals().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9, "sum = {total}");
    }

    #[test]
    fn marginals_match_reference((scores, eps) in row_strategy(60)) {
        let sp = space(&scores, eps);
        let r = Reference::new(&scores, eps);
        for j in 0..scores.len() {
            prop_assert!((sp.marginal(j) - r.marginal(j)).abs() <= 1e-12);
        }
    }

    #[test]
    fn masses_partition_the_row((scores, eps) in row_strategy(60)) {
        let sp = space(&scores, eps);
        let p = &sp.partition;
        prop_assert!((p.mass_above + p.mass_below - 1.0).abs() <= 1e-9);
        prop_assert_eq!(p.above_indices().count() + p.below_indices().count(), scores.len());
        let wa: f64 = p.above_indices().map(|j| sp.weights.w_above[j]).sum();
        let wb: f64 = p.below_indices().map(|j| sp.weights.w_below[j]).sum();
        if p.sum_above > 0.0 { prop_assert!((wa - 1.0).abs() <= 1e-9); }
        if p.sum_below > 0.0 { prop_assert!((wb - 1.0).abs() <= 1e-9); }
    }

    #[test]
    fn set_probability_matches_reference(
        (scores, eps) in row_strategy(12),
        picks in prop::collection::btree_set(0usize..12, 1..5),
    ) {
        let set: Vec<usize> = picks.into_iter().filter(|&j| j < scores.len()).collect();
        prop_assume!(!set.is_empty());
        let sp = space(&scores, eps);
        let r = Reference::new(&scores, eps);
        let expect = r.set_probability(&set);
        let got = sp.log_set_probability(&set).unwrap().exp();
        prop_assert!((got - expect).abs() <= 1e-12 + 1e-9 * expect, "{got} vs {expect}");
    }

    #[test]
    fn pair_utility_is_sub_additive((scores, eps) in row_strategy(20)) {
        let sp = space(&scores, eps);
        for model in [UtilityModel::default(), UtilityModel::modular()] {
            for j in 0..scores.len() {
                for k in (j + 1)..scores.len() {
                    let pair = utility(&model, &sp, &[j, k]).unwrap();
                    let split = utility(&model, &sp, &[j]).unwrap() + utility(&model, &sp, &[k]).unwrap();
                    if pair.is_finite() {
                        prop_assert!(pair <= split + 1e-12, "{pair} > {split}");
                    }
                }
            }
        }
    }

    #[test]
    fn modular_pair_utility_is_exactly_additive((scores, eps) in row_strategy(20)) {
        let sp = space(&scores, eps);
        let m = UtilityModel::modular();
        for j in 0..scores.len() {
            for k in (j + 1)..scores.len() {
                let pair = utility(&m, &sp, &[j, k]).unwrap();
                let split = utility(&m, &sp, &[j]).unwrap() + utility(&m, &sp, &[k]).unwrap();
                if pair.is_finite() {
                    prop_assert!((pair - split).abs() <= 1e-12 * split.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn singleton_utility_orders_like_the_probability(
        (scores, eps) in row_strategy(30),
        scale in 0.1f64..10.0,
    ) {
        let sp = space(&scores, eps);
        let r = Reference::new(&scores, eps);
        let joint = UtilityModel { scale, ..UtilityModel::default() };
        let modular = UtilityModel { scale, ..UtilityModel::modular() };
        for j in 0..scores.len() {
            for k in 0..scores.len() {
                let (gj, gk) = (r.set_probability(&[j]), r.set_probability(&[k]));
                if gj > gk * (1.0 + 1e-9) {
                    prop_assert!(utility(&joint, &sp, &[j]).unwrap() > utility(&joint, &sp, &[k]).unwrap());
                }
                let (mj, mk) = (r.marginal(j), r.marginal(k));
                if mj > mk * (1.0 + 1e-9) {
                    prop_assert!(utility(&modular, &sp, &[j]).unwrap() > utility(&modular, &sp, &[k]).unwrap());
                }
            }
        }
    }

    #[test]
    fn single_side_joint_sums_rank_like_marginals(scores in prop::collection::vec(0.6f64..1.0, 3..30)) {
        let sp = space(&scores, 0.5);
        prop_assert_eq!(sp.partition.below_indices().count(), 0);
        let n = scores.len();
        let sums: Vec<f64> = (0..n)
            .map(|j| (0..n).filter(|&k| k != j).map(|k| sp.joint(j, k).unwrap()).sum())
            .collect();
        let total: f64 = sums.iter().sum();
        let m = sp.marginals();
        for j in 0..n {
            for k in 0..n {
                let (a, b) = (sums[j] / total, sums[k] / total);
                if a > b * (1.0 + 1e-9) {
                    prop_assert!(m[j] > m[k]);
                }
            }
        }
    }

    #[test]
    fn raising_a_member_weight_never_lowers_g(
        (scores, eps) in row_strategy(12),
        picks in prop::collection::btree_set(0usize..12, 1..5),
        factor in 1.0f64..3.0,
    ) {
        let set: Vec<usize> = picks.into_iter().filter(|&j| j < scores.len()).collect();
        prop_assume!(!set.is_empty());
        let sp = space(&scores, eps);
        let j = set[0];
        let mut w = sp.weights.clone();
        w.w_above[j] *= factor;
        w.w_below[j] *= factor;
        let before = set_probability(&sp.partition, &sp.weights, &set).unwrap();
        let after = set_probability(&sp.partition, &w, &set).unwrap();
        prop_assert!(after >= before * (1.0 - 1e-12), "{after} < {before}");
    }
}

#[test]
fn worked_example_goldens() {
    let row = SimilarityRow::new(0, vec![1, 2, 3], vec![0.4, 0.55, 0.6]);
    let cases = [(0.5, 0.742, [0.297, 0.324, 0.445]), (0.6, 0.387, [0.349, 0.380, 0.523])];
    for (eps, pi, joints) in cases {
        let sp = PreferenceSpace::new(row.clone(), eps).unwrap();
        assert_relative_eq!(sp.partition.mass_above, pi, epsilon = 1e-3);
        for ((j, k), want) in [(0, 1), (0, 2), (1, 2)].into_iter().zip(joints) {
            assert_relative_eq!(sp.joint(j, k).unwrap(), want, epsilon = 1e-3);
        }
    }
}

#[test]
fn worked_example_out_of_side_weight_exceeds_one() {
    let row = SimilarityRow::new(0, vec![1, 2, 3], vec![0.4, 0.55, 0.6]);
    let sp = PreferenceSpace::new(row, 0.5).unwrap();
    assert_relative_eq!(sp.weights.w_below[1], 1.375, epsilon = 1e-12);
}

#[test]
fn marginal_sum_on_a_large_row() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let row = common::random_row(&mut rng, 10_000, -0.5);
    let sp = PreferenceSpace::new(row, 0.37).unwrap();
    assert_relative_eq!(sp.marginals().iter().sum::<f64>(), 1.0, epsilon = 1e-9);
}
