//! Scenario partitions, aggregated cluster data and dual-based refinement.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lp::LpModel;
use crate::mip::MipModel;
use crate::model::Instance;
use crate::sparse::CsrMatrix;

/// Exact set partition of `0..universe` into nonempty sorted clusters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    clusters: Vec<Vec<usize>>,
    generation: usize,
    universe: usize,
}

impl Partition {
    /// `{S}`
    pub fn single(universe: usize) -> Self {
        Partition {
            clusters: vec![(0..universe).collect()],
            generation: 0,
            universe,
        }
    }

    pub fn singletons(universe: usize) -> Self {
        Partition {
            clusters: (0..universe).map(|s| vec![s]).collect(),
            generation: 0,
            universe,
        }
    }

    pub fn from_clusters(universe: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; universe];
        let mut out = Vec::with_capacity(clusters.len());
        for mut c in clusters {
            if c.is_empty() {
                return Err(Error::EmptyCluster);
            }
            c.sort_unstable();
            for &s in &c {
                if s >= universe {
                    return Err(Error::ScenarioOutOfRange {
                        index: s,
                        count: universe,
                    });
                }
                if std::mem::replace(&mut seen[s], true) {
                    return Err(Error::InvalidPartition(format!("scenario {s} appears twice")));
                }
            }
            out.push(c);
        }
        if let Some(s) = seen.iter().position(|&b| !b) {
            return Err(Error::InvalidPartition(format!("scenario {s} is not covered")));
        }
        Ok(Partition {
            clusters: out,
            generation: 0,
            universe,
        })
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Number of `refine` calls that produced this partition.
    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Splits every cluster into groups of scenarios whose dual vectors are
    /// pairwise within `delta` in max-norm. Scenarios are scanned in index
    /// order and join the first group they are compatible with.
    pub fn refine(
        &self,
        duals: &BTreeMap<usize, Vec<f64>>,
        delta: f64,
        scaling: DualScaling,
    ) -> Result<Partition> {
        if !(delta > 0.0) {
            return Err(Error::InvalidConfig(format!("refinement threshold {delta} must be > 0")));
        }
        let mut clusters = Vec::with_capacity(self.clusters.len());
        for cluster in &self.clusters {
            let mut vecs = Vec::with_capacity(cluster.len());
            for &s in cluster {
                vecs.push(duals.get(&s).ok_or(Error::MissingDual(s))?.as_slice());
            }
            let scale = match scaling {
                DualScaling::Raw => 1.0,
                DualScaling::MaxNorm => {
                    let m = vecs.iter().flat_map(|v| v.iter()).fold(0.0f64, |a, x| a.max(x.abs()));
                    if m > 0.0 {
                        m
                    } else {
                        1.0
                    }
                }
            };
            let dist = |a: &[f64], b: &[f64]| {
                a.iter()
                    .zip(b)
                    .fold(0.0f64, |m, (x, y)| m.max((x - y).abs() / scale))
            };
            let mut groups: Vec<Vec<usize>> = Vec::new();
            for i in 0..cluster.len() {
                let home = groups
                    .iter_mut()
                    .find(|g| g.iter().all(|&k| dist(vecs[i], vecs[k]) <= delta));
                match home {
                    Some(g) => g.push(i),
                    None => groups.push(vec![i]),
                }
            }
            clusters.extend(
                groups
                    .into_iter()
                    .map(|g| g.into_iter().map(|i| cluster[i]).collect::<Vec<_>>()),
            );
        }
        Ok(Partition {
            clusters,
            generation: self.generation + 1,
            universe: self.universe,
        })
    }

    /// Every cluster of `self` lies inside a cluster of `coarse`, and `self`
    /// has strictly more clusters.
    pub fn is_refinement(&self, coarse: &Partition) -> Result<bool> {
        if self.universe != coarse.universe {
            return Err(Error::UniverseMismatch(self.universe, coarse.universe));
        }
        if self.len() <= coarse.len() {
            return Ok(false);
        }
        let mut owner = vec![usize::MAX; coarse.universe];
        for (k, c) in coarse.clusters.iter().enumerate() {
            for &s in c {
                owner[s] = k;
            }
        }
        Ok(self
            .clusters
            .iter()
            .all(|c| c.iter().all(|&s| owner[s] == owner[c[0]])))
    }
}

/// How dual vectors are scaled before the distance test in `refine`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DualScaling {
    /// Compare the duals as returned by the subproblems.
    #[default]
    Raw,
    /// Divide by the largest absolute dual entry in the cluster, which makes
    /// grouping invariant to uniform positive scaling.
    MaxNorm,
}

/// Probability-weighted scenario data of one cluster.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregatedScenario {
    pub cluster: Vec<usize>,
    /// `Σ_{s∈P} p_s`
    pub weight: f64,
    pub technology: CsrMatrix,
    pub rhs: Vec<f64>,
}

pub fn aggregate(instance: &Instance, cluster: &[usize]) -> Result<AggregatedScenario> {
    let weights = instance.theta_weights(cluster)?;
    let weight = cluster.iter().map(|&s| instance.scenarios[s].probability).sum();
    let technology = CsrMatrix::weighted_sum(
        instance.m2(),
        instance.n1(),
        weights
            .iter()
            .map(|&(s, w)| (w, &instance.scenarios[s].technology)),
    )?;
    let mut rhs = vec![0.0; instance.m2()];
    for &(s, w) in &weights {
        for (r, h) in rhs.iter_mut().zip(&instance.scenarios[s].rhs) {
            *r += w * h;
        }
    }
    Ok(AggregatedScenario {
        cluster: cluster.to_vec(),
        weight,
        technology,
        rhs,
    })
}

pub fn aggregate_all(instance: &Instance, partition: &Partition) -> Result<Vec<AggregatedScenario>> {
    if partition.universe() != instance.num_scenarios() {
        return Err(Error::UniverseMismatch(partition.universe(), instance.num_scenarios()));
    }
    partition.clusters().iter().map(|c| aggregate(instance, c)).collect()
}

/// `δ(n) = coefficient / n²`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaSchedule {
    pub coefficient: f64,
}

impl Default for DeltaSchedule {
    fn default() -> Self {
        DeltaSchedule { coefficient: 2.0 }
    }
}

impl DeltaSchedule {
    pub fn delta(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::ZeroRefinementCount);
        }
        Ok(self.coefficient / (n * n) as f64)
    }
}

/// The aggregated problem: one recourse block per cluster with the
/// cluster's averaged data and weight `Σ_{s∈P} p_s`. Variables are `x`
/// followed by the `y^P` blocks in cluster order.
pub fn partition_problem(instance: &Instance, partition: &Partition) -> Result<MipModel> {
    let aggs = aggregate_all(instance, partition)?;
    let mut lp = LpModel::new();
    let xs = instance.add_first_stage(&mut lp, &instance.first_stage_cost);
    for a in &aggs {
        instance.add_recourse_block(&mut lp, &xs, &a.technology, &a.rhs, a.weight);
    }
    let integer = instance.integer_marks(lp.num_vars());
    Ok(MipModel { lp, integer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::builtin;

    fn duals(v: &[&[f64]]) -> BTreeMap<usize, Vec<f64>> {
        v.iter().enumerate().map(|(s, d)| (s, d.to_vec())).collect()
    }

    #[test]
    fn thm1_full_cluster_aggregate() {
        let inst = builtin("thm1").unwrap();
        let a = aggregate(&inst, &[0, 1]).unwrap();
        assert_eq!(a.technology.to_dense(), vec![vec![0.0, 1.0], vec![0.0, -1.0]]);
        assert_eq!(a.rhs, vec![0.5, -0.5]);
        assert_eq!(a.weight, 1.0);
    }

    #[test]
    fn singleton_aggregate_copies() {
        let inst = builtin("refinement-example").unwrap();
        let a = aggregate(&inst, &[2]).unwrap();
        assert_eq!(a.technology, inst.scenarios[2].technology);
        assert_eq!(a.rhs, inst.scenarios[2].rhs);
    }

    #[test]
    fn weighted_rhs() {
        let mut inst = builtin("thm1").unwrap();
        inst.scenarios[0].probability = 0.2;
        inst.scenarios[1].probability = 0.6;
        inst.scenarios[0].rhs = vec![1.0, 0.0];
        inst.scenarios[1].rhs = vec![0.0, 0.0];
        let a = aggregate(&inst, &[0, 1]).unwrap();
        assert!((a.rhs[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn refine_splits_far_duals() {
        let p = Partition::from_clusters(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let d = duals(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 0.0], &[5.0, 0.0]]);
        let r = p.refine(&d, 2.0, DualScaling::Raw).unwrap();
        assert_eq!(r.clusters(), &[vec![0, 1], vec![2], vec![3]]);
        assert!(r.is_refinement(&p).unwrap());
        assert_eq!(r.generation(), 1);
    }

    #[test]
    fn refine_identical_duals_keeps_clusters() {
        let p = Partition::single(3);
        let d = duals(&[&[1.0], &[1.0], &[1.0]]);
        let r = p.refine(&d, 0.5, DualScaling::Raw).unwrap();
        assert_eq!(r.clusters(), p.clusters());
        assert_eq!(r.generation(), 1);
    }

    #[test]
    fn refine_tiny_delta_gives_singletons() {
        let p = Partition::single(3);
        let d = duals(&[&[1.0], &[2.0], &[3.0]]);
        let r = p.refine(&d, 1e-12, DualScaling::Raw).unwrap();
        assert_eq!(r.clusters(), Partition::singletons(3).clusters());
    }

    #[test]
    fn refine_groups_need_pairwise_closeness() {
        // 1 is close to 0 and to 2, but 0 and 2 are far apart.
        let p = Partition::single(3);
        let d = duals(&[&[0.0], &[1.0], &[2.0]]);
        let r = p.refine(&d, 1.0, DualScaling::Raw).unwrap();
        assert_eq!(r.clusters(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn refine_missing_dual() {
        let p = Partition::single(2);
        let d = duals(&[&[0.0]]);
        assert!(matches!(p.refine(&d, 1.0, DualScaling::Raw), Err(Error::MissingDual(1))));
    }

    #[test]
    fn is_refinement_cases() {
        let n2 = Partition::from_clusters(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let n1 = Partition::from_clusters(4, vec![vec![0], vec![1], vec![2, 3]]).unwrap();
        let crossing = Partition::from_clusters(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        assert!(n1.is_refinement(&n2).unwrap());
        assert!(!n2.is_refinement(&n2).unwrap());
        assert!(!crossing.is_refinement(&n2).unwrap());
        assert!(Partition::single(3).is_refinement(&n2).is_err());
    }

    #[test]
    fn bad_partitions() {
        assert!(Partition::from_clusters(2, vec![vec![0], vec![]]).is_err());
        assert!(Partition::from_clusters(2, vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::from_clusters(3, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn delta_schedule() {
        let d = DeltaSchedule::default();
        assert_eq!(d.delta(1).unwrap(), 2.0);
        assert_eq!(d.delta(2).unwrap(), 0.5);
        assert_eq!(DeltaSchedule { coefficient: 1.0 }.delta(2).unwrap(), 0.25);
        assert!(matches!(d.delta(0), Err(Error::ZeroRefinementCount)));
    }

    #[test]
    fn thm1_partition_problem_values() {
        let inst = builtin("thm1").unwrap();
        for p in [Partition::single(2), Partition::singletons(2)] {
            let mip = partition_problem(&inst, &p).unwrap();
            let r = crate::mip::solve_mip_with(&mip, Default::default()).unwrap();
            assert!((r.objective - 0.5).abs() < 1e-9);
        }
    }
}
