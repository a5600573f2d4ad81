//! Built-in instances and seeded generators.
//!
//! The sslp-like generator follows the server-location narrative: open sites
//! in the first stage, serve the clients that show up in the second stage.
//! All draws come from a ChaCha8 stream seeded with `seed`:
//!
//! * opening cost `c_j ~ U{open_cost}`
//! * revenue `r_ij ~ U{revenue}` for serving client `i` at site `j`; the
//!   second-stage cost is `d_ij = −r_ij`
//! * resource use `q_ij ~ U{usage}` and capacity `u_j ~ U{capacity}`
//! * client availability `a_i^s ~ Bernoulli(0.5)`, equal scenario weights
//!
//! Rows `0..n1` are capacities `u_j x_j − Σ_i q_ij y_ij ≥ 0`; rows
//! `n1..n1+m` are `−Σ_j y_ij ≥ −a_i^s`, so a client is served at most once
//! and only when present. `y = 0` is always feasible. Columns are ordered
//! client-major: `y_ij` has index `i·n1 + j`.
//!
//! The `sslpv` family replaces site-dependent revenue by a client revenue
//! `r_i ~ U{revenue}` minus a site service cost `U{1, r_i/2}`, and halves
//! capacities (rounded up).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, Scenario, VarKind};
use crate::sparse::CsrMatrix;

pub const BUILTIN_NAMES: &str = "thm1, dim1-random-<seed>, refinement-example";

pub fn builtin(name: &str) -> Result<Instance> {
    match name {
        "thm1" => Ok(thm1()),
        "refinement-example" => Ok(refinement_example()),
        _ => {
            if let Some(seed) = name.strip_prefix("dim1-random-") {
                if let Ok(seed) = seed.parse::<u64>() {
                    return Ok(dim1_random(seed));
                }
            }
            Err(Error::UnknownBuiltin {
                name: name.to_string(),
                available: BUILTIN_NAMES.to_string(),
            })
        }
    }
}

/// Two binaries `(x, y)`, one recourse variable `z`, two equiprobable
/// scenarios: `z ≥ |x − y|` and `z ≥ |x + y − 1|`.
pub fn thm1() -> Instance {
    let scenario = |t: Vec<Vec<f64>>, h: Vec<f64>| Scenario {
        probability: 0.5,
        technology: CsrMatrix::from_dense(&t, 2),
        rhs: h,
    };
    Instance {
        first_stage_cost: vec![0.0, 0.0],
        first_stage_matrix: CsrMatrix::zeros(0, 2),
        first_stage_rhs: vec![],
        integrality: vec![VarKind::Binary; 2],
        first_stage_upper: vec![1.0; 2],
        second_stage_cost: vec![1.0],
        recourse: CsrMatrix::from_dense(&[vec![1.0], vec![1.0]], 1),
        scenarios: vec![
            // z - x + y >= 0, z + x - y >= 0
            scenario(vec![vec![-1.0, 1.0], vec![1.0, -1.0]], vec![0.0, 0.0]),
            // z + x + y >= 1, z - x - y >= -1
            scenario(vec![vec![1.0, 1.0], vec![-1.0, -1.0]], vec![1.0, -1.0]),
        ],
    }
}

/// Four equiprobable scenarios over two binaries and `W = I`, `d = (1, 1)`.
/// Scenarios 0 and 1 share their data, 2 and 3 differ from everything else.
pub fn refinement_example() -> Instance {
    let scenario = |t: Vec<Vec<f64>>, h: Vec<f64>| Scenario {
        probability: 0.25,
        technology: CsrMatrix::from_dense(&t, 2),
        rhs: h,
    };
    Instance {
        first_stage_cost: vec![1.0, 1.5],
        first_stage_matrix: CsrMatrix::zeros(0, 2),
        first_stage_rhs: vec![],
        integrality: vec![VarKind::Binary; 2],
        first_stage_upper: vec![1.0; 2],
        second_stage_cost: vec![1.0, 2.0],
        recourse: CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2),
        scenarios: vec![
            scenario(vec![vec![2.0, 1.0], vec![0.0, 1.0]], vec![2.0, 1.0]),
            scenario(vec![vec![2.0, 1.0], vec![0.0, 1.0]], vec![2.0, 1.0]),
            scenario(vec![vec![1.0, 3.0], vec![2.0, 0.0]], vec![3.0, 1.0]),
            scenario(vec![vec![0.0, 2.0], vec![3.0, 1.0]], vec![1.0, 3.0]),
        ],
    }
}

/// One binary first-stage variable, `2..=6` scenarios, complete recourse.
pub fn dim1_random(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD1A1_0000);
    let scenarios = rng.gen_range(2..=6);
    random_with_rng(&mut rng, scenarios, 1, 4, 3, 4)
}

/// Small random instance with binary first stage and complete recourse
/// (`W` contains an identity block, `d > 0`). Requires `n2 ≥ m2`.
pub fn random_instance(
    scenarios: usize,
    n1: usize,
    n2: usize,
    m2: usize,
    spread: i64,
    seed: u64,
) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_with_rng(&mut rng, scenarios, n1, n2, m2, spread)
}

fn random_with_rng(
    rng: &mut ChaCha8Rng,
    scenarios: usize,
    n1: usize,
    n2: usize,
    m2: usize,
    spread: i64,
) -> Instance {
    assert!(n2 >= m2, "complete recourse needs n2 >= m2");
    let mut w = vec![vec![0.0; n2]; m2];
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = 1.0;
        for v in row.iter_mut().skip(m2) {
            *v = rng.gen_range(0..=2) as f64;
        }
    }
    let d: Vec<f64> = (0..n2).map(|_| rng.gen_range(1..=5) as f64).collect();
    let c: Vec<f64> = (0..n1).map(|_| rng.gen_range(-spread..=spread) as f64).collect();

    let weights: Vec<f64> = (0..scenarios).map(|_| rng.gen_range(1..=4) as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    // Put the rounding residue on the last scenario so the sum is exactly 1.
    let head: f64 = probs[..scenarios - 1].iter().sum();
    probs[scenarios - 1] = 1.0 - head;

    let scenarios = probs
        .into_iter()
        .map(|p| {
            let t: Vec<Vec<f64>> = (0..m2)
                .map(|_| (0..n1).map(|_| rng.gen_range(-spread..=spread) as f64).collect())
                .collect();
            let h: Vec<f64> = (0..m2).map(|_| rng.gen_range(-spread..=spread) as f64).collect();
            Scenario {
                probability: p,
                technology: CsrMatrix::from_dense(&t, n1),
                rhs: h,
            }
        })
        .collect();

    Instance {
        first_stage_cost: c,
        first_stage_matrix: CsrMatrix::zeros(0, n1),
        first_stage_rhs: vec![],
        integrality: vec![VarKind::Binary; n1],
        first_stage_upper: vec![1.0; n1],
        second_stage_cost: d,
        recourse: CsrMatrix::from_dense(&w, n2),
        scenarios,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Sslp,
    SslpV,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Sslp => "sslp",
            Family::SslpV => "sslpv",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sslp" | "sslp-like" => Some(Family::Sslp),
            "sslpv" => Some(Family::SslpV),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub family: Family,
    pub sites: usize,
    pub clients: usize,
    pub scenario_count: usize,
    pub seed: u64,
    pub open_cost: (i64, i64),
    pub revenue: (i64, i64),
    pub usage: (i64, i64),
    pub capacity: (i64, i64),
}

impl GeneratorConfig {
    pub fn sslp(sites: usize, clients: usize, scenario_count: usize, seed: u64) -> Self {
        GeneratorConfig {
            family: Family::Sslp,
            sites,
            clients,
            scenario_count,
            seed,
            open_cost: (15, 45),
            revenue: (5, 20),
            usage: (1, 4),
            capacity: (5, 15),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let count = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::InvalidConfig(format!("{name} must be ≥ 1")))
            } else {
                Ok(())
            }
        };
        count("sites", self.sites)?;
        count("clients", self.clients)?;
        count("scenario_count", self.scenario_count)?;
        for (name, (lo, hi)) in [
            ("open_cost", self.open_cost),
            ("revenue", self.revenue),
            ("usage", self.usage),
            ("capacity", self.capacity),
        ] {
            if lo > hi {
                return Err(Error::InvalidConfig(format!("{name} range has low {lo} > high {hi}")));
            }
        }
        Ok(())
    }

    /// Header lines documenting the draws, written into emitted files.
    pub fn describe(&self) -> Vec<String> {
        vec![
            format!(
                "generator {} sites={} clients={} scenarios={} seed={}",
                self.family.name(),
                self.sites,
                self.clients,
                self.scenario_count,
                self.seed
            ),
            format!(
                "open_cost~U{{{},{}}} revenue~U{{{},{}}} usage~U{{{},{}}} capacity~U{{{},{}}} availability~Bernoulli(0.5)",
                self.open_cost.0,
                self.open_cost.1,
                self.revenue.0,
                self.revenue.1,
                self.usage.0,
                self.usage.1,
                self.capacity.0,
                self.capacity.1
            ),
        ]
    }
}

pub fn generate_sslp(config: &GeneratorConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (n1, m) = (config.sites, config.clients);
    let draw = |rng: &mut ChaCha8Rng, r: (i64, i64)| rng.gen_range(r.0..=r.1) as f64;

    let c: Vec<f64> = (0..n1).map(|_| draw(&mut rng, config.open_cost)).collect();
    let mut capacity: Vec<f64> = (0..n1).map(|_| draw(&mut rng, config.capacity)).collect();
    let mut d = vec![0.0; m * n1];
    let mut usage = vec![0.0; m * n1];
    for i in 0..m {
        let client_revenue = draw(&mut rng, config.revenue);
        for j in 0..n1 {
            let k = i * n1 + j;
            d[k] = match config.family {
                Family::Sslp => -draw(&mut rng, config.revenue),
                Family::SslpV => {
                    let service = rng.gen_range(1.0..=(client_revenue / 2.0).max(1.0)).round();
                    -(client_revenue - service)
                }
            };
            usage[k] = draw(&mut rng, config.usage);
        }
    }
    if config.family == Family::SslpV {
        for u in &mut capacity {
            *u = (*u / 2.0).ceil();
        }
    }

    let m2 = n1 + m;
    let mut w = Vec::new();
    for i in 0..m {
        for j in 0..n1 {
            let k = i * n1 + j;
            w.push((j, k, -usage[k]));
            w.push((n1 + i, k, -1.0));
        }
    }
    let recourse = CsrMatrix::from_triplets(m2, m * n1, w)?.0;
    let technology =
        CsrMatrix::from_triplets(m2, n1, (0..n1).map(|j| (j, j, capacity[j])))?.0;

    let p = 1.0 / config.scenario_count as f64;
    let scenarios = (0..config.scenario_count)
        .map(|_| {
            let mut h = vec![0.0; m2];
            for hi in h.iter_mut().skip(n1) {
                *hi = if rng.gen_bool(0.5) { -1.0 } else { 0.0 };
            }
            Scenario {
                probability: p,
                technology: technology.clone(),
                rhs: h,
            }
        })
        .collect::<Vec<_>>();

    let mut inst = Instance {
        first_stage_cost: c,
        first_stage_matrix: CsrMatrix::zeros(0, n1),
        first_stage_rhs: vec![],
        integrality: vec![VarKind::Binary; n1],
        first_stage_upper: vec![1.0; n1],
        second_stage_cost: d,
        recourse,
        scenarios,
    };
    // Equal weights: fix the rounding residue so Σ p = 1 to machine precision.
    let head: f64 = inst.scenarios[..inst.scenarios.len() - 1].iter().map(|s| s.probability).sum();
    inst.scenarios.last_mut().expect("at least one scenario").probability = 1.0 - head;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm1_data() {
        let inst = thm1();
        assert_eq!(inst.scenarios[0].technology.to_dense()[0], vec![-1.0, 1.0]);
        assert_eq!(inst.scenarios[0].rhs, vec![0.0, 0.0]);
        assert_eq!(inst.scenarios[1].technology.to_dense()[0], vec![1.0, 1.0]);
        assert_eq!(inst.scenarios[1].rhs, vec![1.0, -1.0]);
        assert_eq!(inst.recourse.to_dense(), vec![vec![1.0], vec![1.0]]);
    }

    #[test]
    fn builtins_validate() {
        for name in ["thm1", "refinement-example", "dim1-random-7", "dim1-random-0"] {
            let inst = builtin(name).unwrap();
            assert!(inst.validate().is_empty(), "{name}: {:?}", inst.validate());
        }
        assert_eq!(builtin("refinement-example").unwrap().num_scenarios(), 4);
        let d1 = builtin("dim1-random-7").unwrap();
        assert_eq!(d1.n1(), 1);
        assert_eq!(d1.integer_count(), 1);
    }

    #[test]
    fn unknown_builtin_lists_names() {
        let err = builtin("nope").unwrap_err().to_string();
        assert!(err.contains("thm1") && err.contains("refinement-example"));
    }

    #[test]
    fn sslp_is_deterministic_and_valid() {
        let cfg = GeneratorConfig::sslp(5, 10, 8, 42);
        let a = generate_sslp(&cfg).unwrap();
        let b = generate_sslp(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.validate().is_empty());
        let mut v = cfg.clone();
        v.family = Family::SslpV;
        assert!(generate_sslp(&v).unwrap().validate().is_empty());
    }

    #[test]
    fn sslp_dimensions_follow_profile() {
        let inst = generate_sslp(&GeneratorConfig::sslp(20, 100, 50, 1)).unwrap();
        assert_eq!(inst.n1(), 20);
        assert_eq!(inst.m2(), 120);
        assert_eq!(inst.n2(), 2000);
        assert_eq!(inst.num_scenarios(), 50);
    }

    #[test]
    fn zero_scenarios_rejected() {
        let err = generate_sslp(&GeneratorConfig::sslp(5, 10, 0, 1)).unwrap_err();
        assert!(err.to_string().contains("scenario_count must be ≥ 1"));
    }
}
