use std::collections::BTreeMap;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use proptest::prelude::*;

use stochcuts::benders::{make_benders_cut, make_pbbenc};
use stochcuts::instances::random_instance;
use stochcuts::io::{emit, parse};
use stochcuts::partition::{aggregate, DualScaling, Partition};

fn small_instance() -> impl Strategy<Value = stochcuts::Instance> {
    (1usize..6, 1usize..5, 2usize..5, 1usize..3, 1i64..6, any::<u64>())
        .prop_map(|(s, n1, n2, m2, spread, seed)| random_instance(s, n1, n2, m2.min(n2), spread, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emitted_instances_parse_back(inst in small_instance()) {
        let parsed = parse(&emit(&inst, "p")).unwrap();
        prop_assert_eq!(parsed.name, "p");
        prop_assert!(parsed.warnings.is_empty());
        prop_assert_eq!(parsed.instance, inst);
    }

    #[test]
    fn theta_weights_sum_to_one(inst in small_instance(), mask in 1u32..64) {
        let cluster: Vec<usize> = (0..inst.num_scenarios()).filter(|s| mask & (1 << s) != 0).collect();
        prop_assume!(!cluster.is_empty());
        let w = inst.theta_weights(&cluster).unwrap();
        assert_relative_eq!(w.iter().map(|p| p.1).sum::<f64>(), 1.0, max_relative = 1e-12);
        let agg = aggregate(&inst, &cluster).unwrap();
        let p: f64 = cluster.iter().map(|&s| inst.scenarios[s].probability).sum();
        assert_relative_eq!(agg.weight, p, max_relative = 1e-12);
    }

    #[test]
    fn refinement_groups_close_duals(
        duals in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 1..9),
        delta in 0.1f64..4.0,
        split in any::<bool>(),
    ) {
        let n = duals.len();
        let start = if split && n > 1 {
            Partition::from_clusters(n, vec![(0..n / 2).collect(), (n / 2..n).collect()]).unwrap()
        } else {
            Partition::single(n)
        };
        let map: BTreeMap<usize, Vec<f64>> = duals.iter().cloned().enumerate().collect();
        let fine = start.refine(&map, delta, DualScaling::Raw).unwrap();
        if fine.len() == start.len() {
            prop_assert_eq!(fine.clusters(), start.clusters());
        } else {
            prop_assert!(fine.is_refinement(&start).unwrap());
        }
        prop_assert!(fine.len() <= n);
        for c in fine.clusters() {
            for &a in c {
                for &b in c {
                    let d = duals[a].iter().zip(&duals[b]).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                    prop_assert!(d <= delta, "{a} and {b} are {d} apart");
                }
            }
        }
    }

    #[test]
    fn pbbenc_is_weighted_benders_sum(inst in small_instance(), seed in any::<u64>()) {
        let cluster: Vec<usize> = (0..inst.num_scenarios()).collect();
        let lambda: Vec<f64> = (0..inst.m2()).map(|i| ((seed >> (i % 60)) % 7) as f64 * 0.5).collect();
        let pb = make_pbbenc(&inst, &aggregate(&inst, &cluster).unwrap(), &lambda).unwrap();
        let mut x = vec![0.0; inst.n1()];
        let mut rhs = 0.0;
        for (s, w) in inst.theta_weights(&cluster).unwrap() {
            let c = make_benders_cut(&inst, s, &lambda).unwrap();
            for (acc, v) in x.iter_mut().zip(&c.x_coeffs) {
                *acc += w * v;
            }
            rhs += w * c.rhs;
            let theta = pb.theta_coeffs.iter().find(|t| t.0 == s).unwrap().1;
            assert_relative_eq!(theta, w, max_relative = 1e-12);
        }
        for (a, b) in pb.x_coeffs.iter().zip(&x) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9 * (1.0 + b.abs()));
        }
        assert_abs_diff_eq!(pb.rhs, rhs, epsilon = 1e-9 * (1.0 + rhs.abs()));
    }
}
