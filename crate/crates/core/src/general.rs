//! Monotone models over ordered, non-binary feature spaces, reduced to the
//! Boolean case by snapping coordinates to the top or bottom element.

use std::cell::Cell;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::counterfactual::{find_optimal, SearchConfig};
use crate::error::{invariant, usage, Error, Result};
use crate::model_core::{Instance, Model, Oracle};

/// A finite totally ordered feature space with its top and bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedFeatureSpace {
    values: Vec<i64>,
}

impl OrderedFeatureSpace {
    /// Values are sorted and deduplicated; the space must be non-empty.
    pub fn new(mut values: Vec<i64>) -> Result<Self> {
        values.sort_unstable();
        values.dedup();
        if values.is_empty() {
            return Err(usage("feature space must be non-empty"));
        }
        Ok(OrderedFeatureSpace { values })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn top(&self) -> i64 {
        *self.values.last().expect("non-empty")
    }

    pub fn bottom(&self) -> i64 {
        self.values[0]
    }

    pub fn contains(&self, v: i64) -> bool {
        self.values.binary_search(&v).is_ok()
    }
}

/// A point of `X^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneralInstance(Vec<i64>);

impl GeneralInstance {
    pub fn new(coords: Vec<i64>) -> Self {
        GeneralInstance(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: i64) {
        self.0[i] = v;
    }

    /// Coordinatewise `<=`.
    pub fn le(&self, other: &GeneralInstance) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Features where the two instances disagree (0-based).
    pub fn delta(&self, other: &GeneralInstance) -> Vec<usize> {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .filter_map(|(i, (a, b))| (a != b).then_some(i))
            .collect()
    }

    /// The `index`-th point of `space^d` in mixed-radix order, first
    /// coordinate most significant.
    pub fn nth(space: &OrderedFeatureSpace, d: usize, mut index: usize) -> Self {
        let base = space.len();
        let mut coords = vec![0; d];
        for slot in coords.iter_mut().rev() {
            *slot = space.values()[index % base];
            index /= base;
        }
        GeneralInstance(coords)
    }
}

impl fmt::Display for GeneralInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for GeneralInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| usage(format!("bad coordinate {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(GeneralInstance)
    }
}

impl Serialize for GeneralInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A model `f : X^d -> {0,1}`.
pub trait GeneralModel {
    fn dimension(&self) -> usize;
    fn space(&self) -> &OrderedFeatureSpace;
    fn evaluate(&self, x: &GeneralInstance) -> bool;
}

/// Query-counted access to a [`GeneralModel`].
pub struct GeneralOracle<'m> {
    model: &'m dyn GeneralModel,
    count: Cell<u64>,
}

impl<'m> GeneralOracle<'m> {
    pub fn new(model: &'m dyn GeneralModel) -> Self {
        GeneralOracle {
            model,
            count: Cell::new(0),
        }
    }

    pub fn dimension(&self) -> usize {
        self.model.dimension()
    }

    pub fn space(&self) -> &OrderedFeatureSpace {
        self.model.space()
    }

    pub fn model(&self) -> &'m dyn GeneralModel {
        self.model
    }

    pub fn query(&self, x: &GeneralInstance) -> bool {
        debug_assert_eq!(x.len(), self.dimension());
        self.count.set(self.count.get() + 1);
        self.model.evaluate(x)
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }

    /// Checks length and space membership before querying.
    pub fn eval(&self, x: &GeneralInstance) -> Result<bool> {
        validate_instance(self.model, x)?;
        Ok(self.query(x))
    }
}

pub fn validate_instance(model: &dyn GeneralModel, x: &GeneralInstance) -> Result<()> {
    if x.len() != model.dimension() {
        return Err(usage(format!(
            "instance has {} coordinates, model dimension is {}",
            x.len(),
            model.dimension()
        )));
    }
    if let Some(v) = x.coords().iter().find(|&&v| !model.space().contains(v)) {
        return Err(usage(format!("value {v} is not in the feature space")));
    }
    Ok(())
}

/// `[x_1 + … + x_d >= threshold]`.
#[derive(Debug, Clone)]
pub struct GeneralThreshold {
    d: usize,
    space: OrderedFeatureSpace,
    threshold: i64,
}

impl GeneralThreshold {
    pub fn new(d: usize, space: OrderedFeatureSpace, threshold: i64) -> Result<Self> {
        if d == 0 {
            return Err(usage("dimension must be at least 1"));
        }
        Ok(GeneralThreshold { d, space, threshold })
    }
}

impl GeneralModel for GeneralThreshold {
    fn dimension(&self) -> usize {
        self.d
    }

    fn space(&self) -> &OrderedFeatureSpace {
        &self.space
    }

    fn evaluate(&self, x: &GeneralInstance) -> bool {
        x.coords().iter().sum::<i64>() >= self.threshold
    }
}

/// One literal `x_var >= min` of a [`GeneralDnf`] term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtLeast {
    pub var: usize,
    pub min: i64,
}

/// Disjunction of conjunctions of `x_i >= v` literals. Variables 0-based.
#[derive(Debug, Clone)]
pub struct GeneralDnf {
    d: usize,
    space: OrderedFeatureSpace,
    terms: Vec<Vec<AtLeast>>,
}

impl GeneralDnf {
    pub fn new(d: usize, space: OrderedFeatureSpace, terms: Vec<Vec<AtLeast>>) -> Result<Self> {
        if d == 0 {
            return Err(usage("dimension must be at least 1"));
        }
        if let Some(bad) = terms.iter().flatten().find(|l| l.var >= d) {
            return Err(usage(format!("term variable {} out of range 1..={d}", bad.var + 1)));
        }
        Ok(GeneralDnf { d, space, terms })
    }
}

impl GeneralModel for GeneralDnf {
    fn dimension(&self) -> usize {
        self.d
    }

    fn space(&self) -> &OrderedFeatureSpace {
        &self.space
    }

    fn evaluate(&self, x: &GeneralInstance) -> bool {
        self.terms
            .iter()
            .any(|t| t.iter().all(|l| x.get(l.var) >= l.min))
    }
}

/// JSON description of a general-feature model; variables 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneralModelSpec {
    GeneralThreshold {
        d: usize,
        space: Vec<i64>,
        threshold: i64,
    },
    GeneralDnf {
        d: usize,
        space: Vec<i64>,
        terms: Vec<Vec<AtLeast>>,
    },
}

pub type SharedGeneralModel = Box<dyn GeneralModel + Send + Sync>;

impl GeneralModelSpec {
    pub fn build(&self) -> Result<SharedGeneralModel> {
        Ok(match self {
            GeneralModelSpec::GeneralThreshold { d, space, threshold } => Box::new(GeneralThreshold::new(
                *d,
                OrderedFeatureSpace::new(space.clone())?,
                *threshold,
            )?),
            GeneralModelSpec::GeneralDnf { d, space, terms } => {
                let terms = terms
                    .iter()
                    .map(|t| {
                        t.iter()
                            .map(|l| match l.var.checked_sub(1) {
                                Some(var) => Ok(AtLeast { var, min: l.min }),
                                None => Err(usage("term variables are 1-based")),
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Box::new(GeneralDnf::new(*d, OrderedFeatureSpace::new(space.clone())?, terms)?)
            }
        })
    }

    /// Build and, when `|X|^d` is small enough, audit monotonicity.
    pub fn build_checked(&self) -> Result<SharedGeneralModel> {
        let model = self.build()?;
        if let Some((lo, hi)) = check_monotone_general(model.as_ref())? {
            return Err(usage(format!(
                "model is not monotone: f({lo}) = 1 but f({hi}) = 0"
            )));
        }
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Cube sizes up to this are audited exhaustively.
pub const GENERAL_MONOTONE_MAX_POINTS: usize = 60_000;

fn cube_size(space: &OrderedFeatureSpace, d: usize) -> Option<usize> {
    space.len().checked_pow(d as u32)
}

/// Exhaustive monotonicity audit over covering pairs. `Ok(None)` when
/// monotone or when `|X|^d` is above the audit cap.
pub fn check_monotone_general(model: &dyn GeneralModel) -> Result<Option<(GeneralInstance, GeneralInstance)>> {
    let d = model.dimension();
    let space = model.space();
    let n = match cube_size(space, d) {
        Some(n) if n <= GENERAL_MONOTONE_MAX_POINTS => n,
        _ => return Ok(None),
    };
    for idx in 0..n {
        let x = GeneralInstance::nth(space, d, idx);
        if !model.evaluate(&x) {
            continue;
        }
        for i in 0..d {
            let pos = space.values().binary_search(&x.get(i)).expect("member");
            if let Some(&next) = space.values().get(pos + 1) {
                let mut y = x.clone();
                y.set(i, next);
                if !model.evaluate(&y) {
                    return Ok(Some((x, y)));
                }
            }
        }
    }
    Ok(None)
}

/// `x↑y`: coordinates selected by `y` go to the top element.
pub fn snap_up(space: &OrderedFeatureSpace, x: &GeneralInstance, y: &Instance) -> Result<GeneralInstance> {
    check_lengths(x, y)?;
    Ok(GeneralInstance(
        x.coords()
            .iter()
            .zip(y.bits())
            .map(|(&v, &b)| if b { space.top() } else { v })
            .collect(),
    ))
}

/// `x↓y`: coordinates not selected by `y` go to the bottom element.
pub fn snap_down(space: &OrderedFeatureSpace, x: &GeneralInstance, y: &Instance) -> Result<GeneralInstance> {
    check_lengths(x, y)?;
    Ok(GeneralInstance(
        x.coords()
            .iter()
            .zip(y.bits())
            .map(|(&v, &b)| if b { v } else { space.bottom() })
            .collect(),
    ))
}

fn check_lengths(x: &GeneralInstance, y: &Instance) -> Result<()> {
    if x.len() != y.len() {
        return Err(usage(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    Ok(())
}

/// The Boolean model `f_x(y) = f(x↓y)` if `f(x) = 1`, else `f(x↑y)`.
/// Every evaluation is one query to the underlying general oracle.
pub struct ReducedModel<'a, 'm> {
    oracle: &'a GeneralOracle<'m>,
    base: GeneralInstance,
    value_at_base: bool,
}

impl<'a, 'm> ReducedModel<'a, 'm> {
    pub fn base(&self) -> &GeneralInstance {
        &self.base
    }

    /// `f(x)`, which fixes the snapping direction.
    pub fn value_at_base(&self) -> bool {
        self.value_at_base
    }

    /// The general instance `f_x(y)` evaluates.
    pub fn snap(&self, y: &Instance) -> GeneralInstance {
        let space = self.oracle.space();
        let snapped = if self.value_at_base {
            snap_down(space, &self.base, y)
        } else {
            snap_up(space, &self.base, y)
        };
        snapped.expect("lengths checked at construction")
    }
}

impl Model for ReducedModel<'_, '_> {
    fn dimension(&self) -> usize {
        self.base.len()
    }

    fn evaluate(&self, y: &Instance) -> bool {
        self.oracle.query(&self.snap(y))
    }
}

/// Build `f_x`; costs one query for `f(x)`.
pub fn reduce<'a, 'm>(oracle: &'a GeneralOracle<'m>, x: &GeneralInstance) -> Result<ReducedModel<'a, 'm>> {
    validate_instance(oracle.model(), x)?;
    let value_at_base = oracle.query(x);
    Ok(ReducedModel {
        oracle,
        base: x.clone(),
        value_at_base,
    })
}

/// The optimal difference sets of a general-feature instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralReport {
    /// 0-based, each ascending, sorted lexicographically.
    #[serde(skip)]
    pub diff_sets: Vec<Vec<usize>>,
    pub distance: usize,
    /// One snapped optimal counterfactual per difference set, same order.
    /// Representative only: other optima may share a difference set.
    pub representatives: Vec<GeneralInstance>,
    pub queries: u64,
}

impl GeneralReport {
    pub fn diff_sets_one_based(&self) -> Vec<Vec<usize>> {
        self.diff_sets
            .iter()
            .map(|s| s.iter().map(|i| i + 1).collect())
            .collect()
    }
}

/// `{Δ(x*, x') : x' optimal for x*}` for a monotone general model, via the
/// Boolean search on `f_{x*}` from the point `f(x*)^d`.
pub fn find_optimal_general(oracle: &GeneralOracle, x_star: &GeneralInstance, config: &SearchConfig) -> Result<GeneralReport> {
    validate_instance(oracle.model(), x_star)?;
    let d = oracle.dimension();
    let space = oracle.space();
    let bottom = oracle.query(&GeneralInstance(vec![space.bottom(); d]));
    let top = oracle.query(&GeneralInstance(vec![space.top(); d]));
    if bottom == top {
        return Err(Error::NoCounterfactual);
    }
    if bottom && !top {
        return Err(invariant("f(bottom^d) = 1 but f(top^d) = 0; model is not monotone"));
    }
    let reduced = reduce(oracle, x_star)?;
    let start = Instance::constant(d, reduced.value_at_base());
    let boolean = Oracle::new(&reduced);
    let report = find_optimal(&boolean, &start, config)?;
    let mut pairs: Vec<(Vec<usize>, GeneralInstance)> = report
        .optima
        .iter()
        .zip(&report.diff_sets)
        .map(|(y, diff)| (diff.clone(), reduced.snap(y)))
        .collect();
    pairs.sort();
    let (diff_sets, representatives) = pairs.into_iter().unzip();
    Ok(GeneralReport {
        diff_sets,
        distance: report.distance,
        representatives,
        queries: oracle.count(),
    })
}

/// Cap on `|X|·d` work per point for [`general_sensitivity`].
pub const GENERAL_SENSITIVITY_MAX_WORK: usize = 10_000;
/// Cap on `|X|^d` for brute-force enumeration of a general cube.
pub const GENERAL_ENUMERATION_MAX_POINTS: usize = 1 << 20;

/// `S_f(x)`: features `i` for which some `a ∈ X` at position `i` flips `f(x)`.
pub fn general_sensitivity_at(model: &dyn GeneralModel, x: &GeneralInstance) -> usize {
    let fx = model.evaluate(x);
    (0..x.len())
        .filter(|&i| {
            model.space().values().iter().any(|&a| {
                let mut y = x.clone();
                y.set(i, a);
                model.evaluate(&y) != fx
            })
        })
        .count()
}

/// `S(f)` over all of `X^d`.
pub fn general_sensitivity(model: &dyn GeneralModel) -> Result<usize> {
    let d = model.dimension();
    let space = model.space();
    if space.len() * d > GENERAL_SENSITIVITY_MAX_WORK {
        return Err(Error::Capability(format!(
            "|X|·d = {} exceeds {GENERAL_SENSITIVITY_MAX_WORK}",
            space.len() * d
        )));
    }
    let n = cube_size(space, d)
        .filter(|&n| n <= GENERAL_ENUMERATION_MAX_POINTS)
        .ok_or_else(|| Error::Capability("|X|^d exceeds 2^20".into()))?;
    Ok((0..n)
        .map(|idx| general_sensitivity_at(model, &GeneralInstance::nth(space, d, idx)))
        .max()
        .unwrap_or(0))
}
