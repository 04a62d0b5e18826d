//! Query-complexity benchmarks on the hard families: planted thresholds and
//! dictators. Every trial is seeded from `(seed, cell, trial)`, so reports
//! are reproducible byte for byte.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    ball_search, brute_force_optimal, random_flip_probe, random_subset_probe, random_walk_descent,
    truncated_ball, validate_local_trace,
};
use crate::counterfactual::{find_optimal, SearchConfig};
use crate::error::{usage, Result};
use crate::idt::depth_cap_for;
use crate::model_core::{Dictator, Instance, Model, Oracle, ThresholdPlanted};

/// `f(x) = 1` iff at least `delta + 1` of the first `s` coordinates are set
/// or the first `s` coordinates equal `z`.
pub fn make_planted(d: usize, s: usize, delta: usize, z: Vec<bool>) -> Result<ThresholdPlanted> {
    ThresholdPlanted::new(d, s, delta, z)
}

/// [`make_planted`] with `z` drawn uniformly among weight-`delta` strings.
pub fn random_planted<R: Rng + ?Sized>(rng: &mut R, d: usize, s: usize, delta: usize) -> Result<ThresholdPlanted> {
    if delta > s || s > d {
        return Err(usage(format!("need delta <= S <= d, got d={d}, S={s}, delta={delta}")));
    }
    make_planted(d, s, delta, random_weight_z(rng, s, delta))
}

/// A uniformly random length-`s` bit vector of weight `w`.
pub fn random_weight_z<R: Rng + ?Sized>(rng: &mut R, s: usize, w: usize) -> Vec<bool> {
    let mut z = vec![false; s];
    for i in sample(rng, s, w) {
        z[i] = true;
    }
    z
}

/// `f(x) = x_i` (0-based `i`).
pub fn make_dictator(d: usize, i: usize) -> Result<Dictator> {
    Dictator::new(d, i)
}

/// A dictator on a uniformly random coordinate.
pub fn random_dictator<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Dictator> {
    if d == 0 {
        return Err(usage("dimension must be at least 1"));
    }
    make_dictator(d, rng.gen_range(0..d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Planted,
    Dictator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    /// The implicit-decision-tree search.
    Idt,
    /// Full Hamming-ball search.
    Ball,
    /// Exhaustive enumeration; `d <= 20` only.
    Brute,
    /// Ball search truncated at the budget.
    BallBudget,
    /// Random single flips of `x*`.
    RandomProbe,
    /// Random walk then greedy descent.
    RandomWalk,
    /// Random weight-`delta` flips of the first `S` coordinates.
    RandomPlantedProbe,
}

impl Algo {
    pub fn is_budgeted(self) -> bool {
        matches!(
            self,
            Algo::BallBudget | Algo::RandomProbe | Algo::RandomWalk | Algo::RandomPlantedProbe
        )
    }
}

/// A benchmark description, usually read from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub family: Family,
    pub d: Vec<usize>,
    /// Planted family only.
    #[serde(rename = "S", default)]
    pub s: Vec<usize>,
    /// Planted family only.
    #[serde(default)]
    pub delta: Vec<usize>,
    pub algos: Vec<Algo>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Query budget for the budgeted strategies.
    #[serde(default)]
    pub budget: Option<u64>,
    /// Record query traces and report how often they are non-local.
    #[serde(default)]
    pub check_locality: bool,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn validate(&self) -> Result<()> {
        if self.d.is_empty() || self.algos.is_empty() {
            return Err(usage("bench config needs at least one d and one algo"));
        }
        if self.family == Family::Planted && (self.s.is_empty() || self.delta.is_empty()) {
            return Err(usage("planted family needs S and delta grids"));
        }
        if self.family == Family::Dictator && self.algos.contains(&Algo::RandomPlantedProbe) {
            return Err(usage("random-planted-probe applies to the planted family only"));
        }
        if self.algos.iter().any(|a| a.is_budgeted()) && self.budget.is_none() {
            return Err(usage("budgeted algorithms need a budget"));
        }
        Ok(())
    }

    /// Grid points as `(d, S, delta)`; dictators use `S = delta = 1`.
    pub fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &d in &self.d {
            match self.family {
                Family::Dictator => out.push((d, 1, 1)),
                Family::Planted => {
                    for &s in &self.s {
                        for &delta in &self.delta {
                            out.push((d, s, delta));
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryStats {
    pub median: f64,
    pub mean: f64,
    pub max: u64,
}

impl QueryStats {
    fn of(counts: &[u64]) -> Self {
        if counts.is_empty() {
            return QueryStats {
                median: 0.0,
                mean: 0.0,
                max: 0,
            };
        }
        let mut sorted = counts.to_vec();
        sorted.sort_unstable();
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
        };
        QueryStats {
            median,
            mean: sorted.iter().sum::<u64>() as f64 / n as f64,
            max: sorted[n - 1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellParams {
    pub d: usize,
    #[serde(rename = "S")]
    pub s: usize,
    pub delta: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub params: CellParams,
    pub algo: Algo,
    pub trials: usize,
    /// Over trials that did not error.
    pub queries: QueryStats,
    /// Fraction of all trials that returned an optimal counterfactual.
    pub success_rate: f64,
    pub errors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlocal_rate: Option<f64>,
    /// Per-trial query counts, in trial order, errors omitted.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub version: String,
    pub family: Family,
    pub seed: u64,
    pub budget: Option<u64>,
    pub cells: Vec<CellReport>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,d,S,delta,algo,trials,median,mean,max,success_rate,errors,nonlocal_rate\n");
        let family = serde_json::to_value(self.family).expect("plain enum");
        for c in &self.cells {
            let algo = serde_json::to_value(c.algo).expect("plain enum");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                family.as_str().unwrap_or_default(),
                c.params.d,
                c.params.s,
                c.params.delta,
                algo.as_str().unwrap_or_default(),
                c.trials,
                c.queries.median,
                c.queries.mean,
                c.queries.max,
                c.success_rate,
                c.errors,
                c.nonlocal_rate.map(|r| r.to_string()).unwrap_or_default()
            );
        }
        out
    }
}

/// Outcome of a single trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub queries: u64,
    pub success: bool,
    pub local: Option<bool>,
}

fn trial_rng(seed: u64, salt: u64, cell: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(((cell as u64) << 32) | trial as u64);
    rng
}

struct Trial {
    model: Box<dyn Model + Send + Sync>,
    x_star: Instance,
    optimum: Instance,
    s: usize,
    delta: usize,
}

fn build_instance(cfg: &BenchConfig, cell: usize, trial: usize, (d, s, delta): (usize, usize, usize)) -> Result<Trial> {
    let mut rng = trial_rng(cfg.seed, 0, cell, trial);
    Ok(match cfg.family {
        Family::Planted => {
            let f = random_planted(&mut rng, d, s, delta)?;
            let optimum = f.planted_point();
            Trial {
                model: Box::new(f),
                x_star: Instance::zeros(d),
                optimum,
                s,
                delta,
            }
        }
        Family::Dictator => {
            let f = random_dictator(&mut rng, d)?;
            let x_star = Instance::zeros(d);
            let optimum = x_star.flipped(f.index());
            Trial {
                model: Box::new(f),
                x_star,
                optimum,
                s: 1,
                delta: 1,
            }
        }
    })
}

/// Run one algorithm on one generated instance.
pub fn run_trial(cfg: &BenchConfig, cell: usize, trial: usize, params: (usize, usize, usize), algo: Algo) -> Result<TrialOutcome> {
    let inst = build_instance(cfg, cell, trial, params)?;
    let mut rng = trial_rng(cfg.seed, 1 + algo as u64, cell, trial);
    let oracle = if cfg.check_locality {
        Oracle::new(inst.model.as_ref()).with_trace()
    } else {
        Oracle::new(inst.model.as_ref())
    };
    let x = &inst.x_star;
    let budget = cfg.budget.unwrap_or(0);
    let optimal = |y: &Instance| y == &inst.optimum;
    let success = match algo {
        Algo::Idt => {
            let config = SearchConfig {
                depth_cap: Some(depth_cap_for(inst.s)),
                ..SearchConfig::default()
            };
            let r = find_optimal(&oracle, x, &config)?;
            r.optima.iter().any(optimal) && r.optima.len() == 1
        }
        Algo::Ball => {
            let r = ball_search(&oracle, x)?;
            r.optima.iter().any(optimal) && r.optima.len() == 1
        }
        Algo::Brute => {
            let r = brute_force_optimal(&oracle, x)?;
            r.optima.iter().any(optimal) && r.optima.len() == 1
        }
        Algo::BallBudget => truncated_ball(&oracle, x, budget)?.answer.is_some_and(|y| optimal(&y)),
        Algo::RandomProbe => random_flip_probe(&oracle, x, budget, &mut rng)?
            .answer
            .is_some_and(|y| optimal(&y)),
        Algo::RandomWalk => random_walk_descent(&oracle, x, budget, &mut rng)?
            .answer
            .is_some_and(|y| optimal(&y)),
        Algo::RandomPlantedProbe => {
            let first: Vec<usize> = (0..inst.s).collect();
            random_subset_probe(&oracle, x, &first, inst.delta, budget, &mut rng)?
                .answer
                .is_some_and(|y| optimal(&y))
        }
    };
    let local = cfg
        .check_locality
        .then(|| validate_local_trace(&oracle.trace(), x));
    Ok(TrialOutcome {
        queries: oracle.count(),
        success,
        local,
    })
}

/// Run every `(cell, algo)` pair of the grid. Trial errors are counted, not
/// fatal.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for (ci, params) in cfg.cells().into_iter().enumerate() {
        for &algo in &cfg.algos {
            let outcomes: Vec<Result<TrialOutcome>> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| run_trial(cfg, ci, t, params, algo))
                .collect();
            let mut counts = Vec::new();
            let mut successes = 0usize;
            let mut errors = 0usize;
            let mut nonlocal = 0usize;
            for o in outcomes {
                match o {
                    Ok(o) => {
                        counts.push(o.queries);
                        successes += o.success as usize;
                        nonlocal += (o.local == Some(false)) as usize;
                    }
                    Err(e) => {
                        log::warn!("trial failed at d={} algo={algo:?}: {e}", params.0);
                        errors += 1;
                    }
                }
            }
            let trials = cfg.trials.max(1) as f64;
            cells.push(CellReport {
                params: CellParams {
                    d: params.0,
                    s: params.1,
                    delta: params.2,
                },
                algo,
                trials: cfg.trials,
                queries: QueryStats::of(&counts),
                success_rate: successes as f64 / trials,
                errors,
                nonlocal_rate: cfg.check_locality.then(|| nonlocal as f64 / trials),
                counts,
            });
        }
    }
    Ok(BenchReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        family: cfg.family,
        seed: cfg.seed,
        budget: cfg.budget,
        cells,
    })
}
