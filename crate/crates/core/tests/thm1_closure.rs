use stochcuts::oracle::{check_thm1_strictness, check_thm1_strictness_on, Verdict};
use stochcuts::partition::Partition;

#[test]
fn thm1_strictness_holds() {
    let rep = check_thm1_strictness().unwrap();
    assert!(rep.passed(), "{rep}");
}

#[test]
fn singleton_partition_reproduces_lagrangian_closure() {
    let inst = stochcuts::instances::thm1();
    let rep = check_thm1_strictness_on(&inst, "thm1", &Partition::singletons(2)).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    let w = rep.witness.unwrap();
    assert!((w[2] - w[1]).abs() < 1e-6);
}

#[test]
fn degenerate_example_is_flagged() {
    let mut inst = stochcuts::instances::thm1();
    // Scenario 2 then reads z ≥ x + y, z ≥ −x − y: optimum 0 everywhere.
    inst.scenarios[1].rhs = vec![0.0, 0.0];
    let rep = check_thm1_strictness_on(&inst, "thm1-flat", &Partition::single(2)).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    assert!(rep.detail.contains("example degenerate"), "{rep}");
}
