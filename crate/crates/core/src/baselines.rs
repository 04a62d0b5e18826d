//! Reference searches: exhaustive enumeration, Hamming-ball search, and
//! budgeted local strategies that only ever query near already-seen points.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::counterfactual::CounterfactualReport;
use crate::error::{usage, Error, Result};
use crate::general::{GeneralInstance, GeneralOracle, GeneralReport, GENERAL_ENUMERATION_MAX_POINTS};
use crate::model_core::{Instance, Oracle};

/// Largest dimension [`brute_force_optimal`] enumerates.
pub const BRUTE_FORCE_MAX_D: usize = 20;

fn check_dimension(oracle: &Oracle, x_star: &Instance) -> Result<()> {
    if x_star.len() != oracle.dimension() {
        return Err(usage(format!(
            "instance has length {}, model dimension is {}",
            x_star.len(),
            oracle.dimension()
        )));
    }
    Ok(())
}

/// Query all `2^d` instances and keep the nearest ones that flip `f(x*)`.
pub fn brute_force_optimal(oracle: &Oracle, x_star: &Instance) -> Result<CounterfactualReport> {
    check_dimension(oracle, x_star)?;
    let d = oracle.dimension();
    if d > BRUTE_FORCE_MAX_D {
        return Err(Error::Capability(format!(
            "exhaustive search needs d <= {BRUTE_FORCE_MAX_D}, got {d}"
        )));
    }
    let f_star = oracle.query(x_star);
    let mut best = usize::MAX;
    let mut optima = BTreeSet::new();
    for code in 0..1u64 << d {
        let y = Instance::from_code(code, d);
        if oracle.query(&y) == f_star {
            continue;
        }
        let dist = x_star.distance(&y);
        if dist < best {
            best = dist;
            optima.clear();
        }
        if dist == best {
            optima.insert(y);
        }
    }
    if optima.is_empty() {
        return Err(Error::NoCounterfactual);
    }
    Ok(CounterfactualReport::new(x_star, optima, best, oracle))
}

/// Exhaustive search over `X^d` for general features. Difference sets are
/// deduplicated; the representative of each is its smallest optimum.
pub fn brute_force_optimal_general(oracle: &GeneralOracle, x_star: &GeneralInstance) -> Result<GeneralReport> {
    crate::general::validate_instance(oracle.model(), x_star)?;
    let d = oracle.dimension();
    let space = oracle.space();
    let n = space
        .len()
        .checked_pow(d as u32)
        .filter(|&n| n <= GENERAL_ENUMERATION_MAX_POINTS)
        .ok_or_else(|| Error::Capability("|X|^d exceeds 2^20".into()))?;
    let f_star = oracle.query(x_star);
    let mut best = usize::MAX;
    let mut found: Vec<(Vec<usize>, GeneralInstance)> = Vec::new();
    for idx in 0..n {
        let y = GeneralInstance::nth(space, d, idx);
        if oracle.query(&y) == f_star {
            continue;
        }
        let diff = x_star.delta(&y);
        if diff.len() < best {
            best = diff.len();
            found.clear();
        }
        if diff.len() == best {
            found.push((diff, y));
        }
    }
    if found.is_empty() {
        return Err(Error::NoCounterfactual);
    }
    found.sort();
    found.dedup_by(|a, b| a.0 == b.0);
    let (diff_sets, representatives) = found.into_iter().unzip();
    Ok(GeneralReport {
        diff_sets,
        distance: best,
        representatives,
        queries: oracle.count(),
    })
}

/// Hamming-ball search: query `x*`, then every instance at distance 1, 2, …
/// (combinations in lexicographic order) until a radius yields a
/// counterfactual. Costs `1 + Σ_{j<=Δ} C(d, j)` queries.
pub fn ball_search(oracle: &Oracle, x_star: &Instance) -> Result<CounterfactualReport> {
    check_dimension(oracle, x_star)?;
    match ball_core(oracle, x_star, None) {
        Some((found, dist)) => Ok(CounterfactualReport::new(x_star, found, dist, oracle)),
        None => Err(Error::NoCounterfactual),
    }
}

/// Ball search that stops after `budget` queries. Returns the
/// counterfactuals seen in the first successful shell, possibly a subset
/// of it if the budget ran out mid-shell.
pub fn ball_search_budgeted(oracle: &Oracle, x_star: &Instance, budget: u64) -> Result<Option<(BTreeSet<Instance>, usize)>> {
    check_dimension(oracle, x_star)?;
    Ok(ball_core(oracle, x_star, Some(budget)))
}

fn ball_core(oracle: &Oracle, x_star: &Instance, budget: Option<u64>) -> Option<(BTreeSet<Instance>, usize)> {
    let spent = |o: &Oracle| budget.is_some_and(|b| o.count() >= b);
    if spent(oracle) {
        return None;
    }
    let f_star = oracle.query(x_star);
    let d = x_star.len();
    for radius in 1..=d {
        let mut found = BTreeSet::new();
        for combo in (0..d).combinations(radius) {
            if spent(oracle) {
                return (!found.is_empty()).then_some((found, radius));
            }
            let mut y = x_star.clone();
            for &i in &combo {
                y.flip(i);
            }
            if oracle.query(&y) != f_star {
                found.insert(y);
            }
        }
        if !found.is_empty() {
            return Some((found, radius));
        }
    }
    None
}

/// Whether a query trace starts at `x*` and every later query is at
/// Hamming distance exactly 1 from some earlier one.
pub fn validate_local_trace(trace: &[Instance], x_star: &Instance) -> bool {
    let Some(first) = trace.first() else {
        return true;
    };
    if first != x_star {
        return false;
    }
    let mut seen: BTreeSet<&Instance> = BTreeSet::new();
    seen.insert(first);
    for y in &trace[1..] {
        let adjacent = (0..y.len()).any(|i| seen.contains(&y.flipped(i)));
        if !adjacent {
            return false;
        }
        seen.insert(y);
    }
    true
}

/// What a budgeted local strategy returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalOutcome {
    /// The counterfactual the strategy commits to, if any.
    pub answer: Option<Instance>,
    pub queries: u64,
}

/// Budget-truncated ball search; answers with the smallest counterfactual
/// found.
pub fn truncated_ball(oracle: &Oracle, x_star: &Instance, budget: u64) -> Result<LocalOutcome> {
    let found = ball_search_budgeted(oracle, x_star, budget)?;
    Ok(LocalOutcome {
        answer: found.and_then(|(set, _)| set.into_iter().next()),
        queries: oracle.count(),
    })
}

/// Query `x*`, then distinct uniformly random single-bit flips of it.
pub fn random_flip_probe<R: Rng + ?Sized>(oracle: &Oracle, x_star: &Instance, budget: u64, rng: &mut R) -> Result<LocalOutcome> {
    check_dimension(oracle, x_star)?;
    let mut answer = None;
    if budget > 0 {
        let f_star = oracle.query(x_star);
        let mut order: Vec<usize> = (0..x_star.len()).collect();
        order.shuffle(rng);
        for i in order.into_iter().take((budget - 1) as usize) {
            let y = x_star.flipped(i);
            if oracle.query(&y) != f_star {
                answer = Some(y);
                break;
            }
        }
    }
    Ok(LocalOutcome {
        answer,
        queries: oracle.count(),
    })
}

/// Random walk from `x*` by single flips until `f` changes, then greedily
/// revert bits of the difference while the value stays flipped.
pub fn random_walk_descent<R: Rng + ?Sized>(oracle: &Oracle, x_star: &Instance, budget: u64, rng: &mut R) -> Result<LocalOutcome> {
    check_dimension(oracle, x_star)?;
    let d = x_star.len();
    let left = |o: &Oracle| o.count() < budget;
    let mut answer = None;
    if left(oracle) {
        let f_star = oracle.query(x_star);
        let mut cur = x_star.clone();
        while left(oracle) {
            cur.flip(rng.gen_range(0..d));
            if oracle.query(&cur) != f_star {
                answer = Some(cur.clone());
                break;
            }
        }
        if let Some(mut y) = answer.take() {
            let mut diff: Vec<usize> = (0..d).filter(|&i| y.get(i) != x_star.get(i)).collect();
            diff.shuffle(rng);
            for i in diff {
                if !left(oracle) {
                    break;
                }
                let z = y.flipped(i);
                if oracle.query(&z) != f_star {
                    y = z;
                }
            }
            answer = Some(y);
        }
    }
    Ok(LocalOutcome {
        answer,
        queries: oracle.count(),
    })
}

/// Query `x*`, then `x*` with a uniformly random `w`-subset of `features`
/// flipped, without repeats, until the budget runs out.
pub fn random_subset_probe<R: Rng + ?Sized>(
    oracle: &Oracle,
    x_star: &Instance,
    features: &[usize],
    w: usize,
    budget: u64,
    rng: &mut R,
) -> Result<LocalOutcome> {
    check_dimension(oracle, x_star)?;
    if w > features.len() || features.iter().any(|&i| i >= x_star.len()) {
        return Err(usage("subset probe: bad feature list or weight"));
    }
    let mut answer = None;
    if budget > 0 {
        let f_star = oracle.query(x_star);
        let mut tried = BTreeSet::new();
        let total = binomial(features.len(), w);
        while oracle.count() < budget && (tried.len() as u128) < total {
            let mut pick: Vec<usize> = features.choose_multiple(rng, w).copied().collect();
            pick.sort_unstable();
            if !tried.insert(pick.clone()) {
                continue;
            }
            let mut y = x_star.clone();
            for i in pick {
                y.flip(i);
            }
            if oracle.query(&y) != f_star {
                answer = Some(y);
                break;
            }
        }
    }
    Ok(LocalOutcome {
        answer,
        queries: oracle.count(),
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}
