//! All optimal counterfactuals of a monotone oracle, found by searching the
//! implicit decision tree outward from the path of `x*` in order of path
//! distance.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::certificates::Polarity;
use crate::error::{invariant, usage, Error, Result};
use crate::idt::{AuxInfo, Idt, IdtStats};
use crate::model_core::{delta, Instance, Oracle, Restriction};

/// Result of an optimal-counterfactual search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterfactualReport {
    /// Sorted ascending by bit-string.
    pub optima: Vec<Instance>,
    pub distance: usize,
    /// 0-based difference sets, one per optimum, same order.
    #[serde(skip)]
    pub diff_sets: Vec<Vec<usize>>,
    pub queries: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_queries: Option<u64>,
}

impl CounterfactualReport {
    pub fn new(x_star: &Instance, optima: BTreeSet<Instance>, distance: usize, oracle: &Oracle) -> Self {
        let optima: Vec<Instance> = optima.into_iter().collect();
        let diff_sets = optima
            .iter()
            .map(|x| delta(x_star, x).expect("optima share the dimension of x*"))
            .collect();
        let ledger = oracle.ledger();
        CounterfactualReport {
            optima,
            distance,
            diff_sets,
            queries: ledger.count(),
            distinct_queries: ledger.distinct(),
        }
    }

    /// Difference sets with 1-based indices, as reported externally.
    pub fn diff_sets_one_based(&self) -> Vec<Vec<usize>> {
        self.diff_sets
            .iter()
            .map(|s| s.iter().map(|i| i + 1).collect())
            .collect()
    }
}

/// Knobs for [`find_optimal`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchConfig {
    pub depth_cap: Option<usize>,
    pub polarity: Polarity,
}

/// Work done by one `find_minimal` pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MinimalCounters {
    /// Invocations of `find_minimal`, including the outermost.
    pub calls: u64,
    /// IDT operations (`is_leaf` + `query`).
    pub idt_calls: u64,
    /// Oracle queries on `x*` overwritten by the current restriction.
    pub hybrid_queries: u64,
}

/// Per-radius accounting of a [`find_optimal`] run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Entry `k - 1` describes the pass with distance budget `k`.
    pub passes: Vec<MinimalCounters>,
    pub idt: IdtStats,
}

/// All minimal counterfactuals for `x*` among instances consistent with
/// `rho` within distance `k` of `x*` overwritten by `rho`.
pub fn find_minimal(idt: &Idt, rho: &Restriction, x_star: &Instance, k: usize, aux: &AuxInfo) -> Result<BTreeSet<Instance>> {
    let oracle = idt.oracle();
    if x_star.len() != oracle.dimension() || rho.len() != oracle.dimension() {
        return Err(usage("instance, restriction and model dimension must agree"));
    }
    let f_star = oracle.query(x_star);
    let mut counters = MinimalCounters::default();
    let raw = find_minimal_counted(idt, rho, x_star, f_star, k, aux, &mut counters)?;
    Ok(keep_inclusion_minimal(x_star, raw))
}

/// Drop every instance whose difference set from `x*` strictly contains
/// another one's. Costs no queries.
pub fn keep_inclusion_minimal(x_star: &Instance, found: BTreeSet<Instance>) -> BTreeSet<Instance> {
    let diffs: Vec<(Instance, Vec<usize>)> = found
        .into_iter()
        .map(|y| {
            let diff = delta(x_star, &y).expect("same dimension");
            (y, diff)
        })
        .collect();
    let strictly_inside = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|i| b.binary_search(i).is_ok());
    diffs
        .iter()
        .filter(|(_, b)| !diffs.iter().any(|(_, a)| strictly_inside(a, b)))
        .map(|(y, _)| y.clone())
        .collect()
}

/// The bare recursion behind [`find_minimal`], with `f(x*)` supplied by the
/// caller and work counted into `counters`.
///
/// Each branch returns the counterfactuals minimal within that branch, so
/// the union contains every minimal counterfactual of the region but can
/// also contain points dominated by a counterfactual from a sibling branch.
/// [`find_minimal`] filters those out; when all results share one distance,
/// as in [`find_optimal`], there is nothing to filter.
///
/// `k = 0` is tested before `is_leaf`, which skips two queries per
/// exhausted branch without changing the result.
pub fn find_minimal_counted(
    idt: &Idt,
    rho: &Restriction,
    x_star: &Instance,
    f_star: bool,
    k: usize,
    aux: &AuxInfo,
    counters: &mut MinimalCounters,
) -> Result<BTreeSet<Instance>> {
    counters.calls += 1;
    idt.check_depth(rho)?;
    let hybrid = rho.apply(x_star);
    counters.hybrid_queries += 1;
    if idt.oracle().query(&hybrid) != f_star {
        return Ok(BTreeSet::from([hybrid]));
    }
    if k == 0 {
        return Ok(BTreeSet::new());
    }
    counters.idt_calls += 1;
    if idt.is_leaf(rho, aux) {
        return Ok(BTreeSet::new());
    }
    counters.idt_calls += 1;
    let (i, next) = idt.query(rho, aux)?;
    let keep = x_star.get(i);
    let mut found = find_minimal_counted(idt, &rho.with(i, keep), x_star, f_star, k, &next, counters)?;
    let flipped = find_minimal_counted(idt, &rho.with(i, !keep), x_star, f_star, k - 1, &next, counters)?;
    debug_assert!(found.is_disjoint(&flipped), "the two branches partition the search space");
    found.extend(flipped);
    Ok(found)
}

/// Every optimal counterfactual for `x*`, with `Δ_f(x*)`.
pub fn find_optimal(oracle: &Oracle, x_star: &Instance, config: &SearchConfig) -> Result<CounterfactualReport> {
    find_optimal_with_stats(oracle, x_star, config).map(|(r, _)| r)
}

/// [`find_optimal`] plus per-pass accounting.
pub fn find_optimal_with_stats(
    oracle: &Oracle,
    x_star: &Instance,
    config: &SearchConfig,
) -> Result<(CounterfactualReport, SearchStats)> {
    let d = oracle.dimension();
    if x_star.len() != d {
        return Err(usage(format!(
            "instance has length {}, model dimension is {d}",
            x_star.len()
        )));
    }
    let bottom = oracle.query(&Instance::zeros(d));
    let top = oracle.query(&Instance::ones(d));
    if bottom == top {
        return Err(Error::NoCounterfactual);
    }
    if bottom && !top {
        return Err(invariant("f(0^d) = 1 but f(1^d) = 0; model is not monotone"));
    }
    let f_star = oracle.query(x_star);
    let idt = Idt::new(oracle)
        .with_polarity(config.polarity)
        .with_depth_cap(config.depth_cap);
    let root = Restriction::empty(d);
    let mut stats = SearchStats::default();
    for k in 1..=d {
        let mut counters = MinimalCounters::default();
        let found = find_minimal_counted(&idt, &root, x_star, f_star, k, &AuxInfo::default(), &mut counters)?;
        stats.passes.push(counters);
        if !found.is_empty() {
            stats.idt = idt.stats();
            return Ok((CounterfactualReport::new(x_star, found, k, oracle), stats));
        }
    }
    Err(invariant(format!(
        "no counterfactual within distance {d} of a non-constant model; oracle is impure or not monotone"
    )))
}

/// The instance set a minimality claim is relative to.
#[derive(Debug, Clone)]
pub enum Region {
    /// The whole cube.
    Cube,
    /// Instances consistent with `rho` within distance `k` of `x*`
    /// overwritten by `rho`.
    Restricted { rho: Restriction, k: usize },
    Explicit(Vec<Instance>),
}

impl Region {
    fn contains(&self, x_star: &Instance, x: &Instance) -> bool {
        match self {
            Region::Cube => true,
            Region::Restricted { rho, k } => rho.is_consistent(x) && rho.apply(x_star).distance(x) <= *k,
            Region::Explicit(set) => set.contains(x),
        }
    }
}

/// Largest difference set [`is_minimal_counterfactual`] enumerates.
pub const MINIMALITY_MAX_DELTA: usize = 20;

/// Whether `x'` is a minimal counterfactual for `x*` within `region`:
/// it flips `f`, and no instance of the region that differs from `x*` on a
/// strict subset of `Δ(x*, x')` does.
pub fn is_minimal_counterfactual(oracle: &Oracle, x_star: &Instance, x_prime: &Instance, region: &Region) -> Result<bool> {
    let diff = delta(x_star, x_prime)?;
    if x_star.len() != oracle.dimension() {
        return Err(usage("instance length does not match the model dimension"));
    }
    if !region.contains(x_star, x_prime) {
        return Err(usage(format!("{x_prime} is not in the region")));
    }
    if diff.len() > MINIMALITY_MAX_DELTA {
        return Err(Error::Capability(format!(
            "minimality check enumerates 2^|Δ| subsets; |Δ| = {} exceeds {MINIMALITY_MAX_DELTA}",
            diff.len()
        )));
    }
    let f_star = oracle.query(x_star);
    if oracle.query(x_prime) == f_star {
        return Ok(false);
    }
    let full = (1u64 << diff.len()) - 1;
    for mask in 0..full {
        let mut y = x_star.clone();
        for (k, &i) in diff.iter().enumerate() {
            if (mask >> k) & 1 == 1 {
                y.flip(i);
            }
        }
        if region.contains(x_star, &y) && oracle.query(&y) != f_star {
            return Ok(false);
        }
    }
    Ok(true)
}
