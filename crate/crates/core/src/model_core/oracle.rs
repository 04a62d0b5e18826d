//! The query-counted oracle every algorithm goes through.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use super::instance::{Instance, Restriction};
use crate::error::{usage, Error, Result};

/// A pure Boolean model `f : {0,1}^d -> {0,1}`.
pub trait Model {
    fn dimension(&self) -> usize;
    fn evaluate(&self, x: &Instance) -> bool;
}

impl<M: Model + ?Sized> Model for &M {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluate(&self, x: &Instance) -> bool {
        (**self).evaluate(x)
    }
}

impl<M: Model + ?Sized> Model for Box<M> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluate(&self, x: &Instance) -> bool {
        (**self).evaluate(x)
    }
}

impl<M: Model + ?Sized> Model for Arc<M> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluate(&self, x: &Instance) -> bool {
        (**self).evaluate(x)
    }
}

/// Query accounting for one run.
#[derive(Debug, Clone, Default)]
pub struct QueryLedger {
    count: u64,
    trace: Option<Vec<Instance>>,
    memo: Option<HashMap<Instance, bool>>,
}

impl QueryLedger {
    /// Raw number of oracle queries.
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn trace(&self) -> Option<&[Instance]> {
        self.trace.as_deref()
    }

    /// Number of distinct instances queried; only tracked with dedupe on.
    pub fn distinct(&self) -> Option<u64> {
        self.memo.as_ref().map(|m| m.len() as u64)
    }
}

/// A model wrapped with a query ledger. Each run owns its oracle; the model
/// itself is borrowed and may be shared across runs.
pub struct Oracle<'m> {
    model: &'m dyn Model,
    ledger: RefCell<QueryLedger>,
}

impl<'m> Oracle<'m> {
    pub fn new(model: &'m dyn Model) -> Self {
        Oracle {
            model,
            ledger: RefCell::new(QueryLedger::default()),
        }
    }

    /// Record every queried instance.
    pub fn with_trace(self) -> Self {
        self.ledger.borrow_mut().trace = Some(Vec::new());
        self
    }

    /// Memoize answers and report the distinct-query count alongside the
    /// raw count. The raw count is unaffected.
    pub fn with_dedupe(self) -> Self {
        self.ledger.borrow_mut().memo = Some(HashMap::new());
        self
    }

    pub fn dimension(&self) -> usize {
        self.model.dimension()
    }

    pub fn model(&self) -> &'m dyn Model {
        self.model
    }

    /// Evaluate `f(x)`, checking the dimension first.
    pub fn eval(&self, x: &Instance) -> Result<bool> {
        if x.len() != self.dimension() {
            return Err(usage(format!(
                "instance has length {}, model dimension is {}",
                x.len(),
                self.dimension()
            )));
        }
        Ok(self.query(x))
    }

    /// Unchecked query used by the algorithms; the length is a debug
    /// assertion only.
    pub fn query(&self, x: &Instance) -> bool {
        debug_assert_eq!(x.len(), self.dimension());
        let mut ledger = self.ledger.borrow_mut();
        ledger.count += 1;
        if let Some(trace) = ledger.trace.as_mut() {
            trace.push(x.clone());
        }
        if let Some(memo) = ledger.memo.as_mut() {
            if let Some(&v) = memo.get(x) {
                return v;
            }
            let v = self.model.evaluate(x);
            memo.insert(x.clone(), v);
            return v;
        }
        drop(ledger);
        self.model.evaluate(x)
    }

    pub fn count(&self) -> u64 {
        self.ledger.borrow().count
    }

    pub fn ledger(&self) -> QueryLedger {
        self.ledger.borrow().clone()
    }

    pub fn trace(&self) -> Vec<Instance> {
        self.ledger.borrow().trace.clone().unwrap_or_default()
    }
}

/// `f_ρ` viewed as a function of the free coordinates only, in ascending
/// index order.
pub struct RestrictedModel<'a> {
    inner: &'a dyn Model,
    rho: Restriction,
    free: Vec<usize>,
}

impl<'a> RestrictedModel<'a> {
    pub fn new(inner: &'a dyn Model, rho: Restriction) -> Self {
        let free = rho.free();
        RestrictedModel { inner, rho, free }
    }

    /// Lift a point of the free sub-cube to the full cube.
    pub fn lift(&self, y: &Instance) -> Instance {
        let mut x = Instance::zeros(self.rho.len());
        for (i, c) in self.rho.cells().iter().enumerate() {
            if let Some(b) = c {
                x.set(i, *b);
            }
        }
        for (k, &i) in self.free.iter().enumerate() {
            x.set(i, y.get(k));
        }
        x
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }
}

impl Model for RestrictedModel<'_> {
    fn dimension(&self) -> usize {
        self.free.len()
    }

    fn evaluate(&self, y: &Instance) -> bool {
        self.inner.evaluate(&self.lift(y))
    }
}

/// Largest dimension the truth-table tools accept.
pub const TRUTH_TABLE_MAX_D: usize = 24;

/// `table[code] = f(Instance::from_code(code, d))`.
pub fn truth_table(model: &dyn Model) -> Result<Vec<bool>> {
    let d = model.dimension();
    if d > TRUTH_TABLE_MAX_D {
        return Err(Error::Capability(format!(
            "truth table needs d <= {TRUTH_TABLE_MAX_D}, got {d}"
        )));
    }
    Ok((0..1u64 << d)
        .map(|c| model.evaluate(&Instance::from_code(c, d)))
        .collect())
}

/// Outcome of a monotonicity audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonotoneCheck {
    /// Every covering pair `x < x + e_i` was checked.
    Exhaustive { violation: Option<(Instance, Instance)> },
    /// Only sampled comparable pairs were checked.
    Sampled {
        pairs: usize,
        violation: Option<(Instance, Instance)>,
    },
}

impl MonotoneCheck {
    pub fn violation(&self) -> Option<&(Instance, Instance)> {
        match self {
            MonotoneCheck::Exhaustive { violation } | MonotoneCheck::Sampled { violation, .. } => {
                violation.as_ref()
            }
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.violation().is_none()
    }
}

/// Dimensions up to this are audited exhaustively.
pub const EXHAUSTIVE_MONOTONE_MAX_D: usize = 16;

/// Default number of sampled comparable pairs above the exhaustive cap.
pub const DEFAULT_SAMPLED_PAIRS: usize = 10_000;

/// Audit `x <= y => f(x) <= f(y)`. Exhaustive over covering pairs for
/// `d <= 16` (which implies the full property by transitivity), sampled
/// otherwise.
pub fn check_monotone<R: Rng + ?Sized>(model: &dyn Model, rng: &mut R, pairs: usize) -> MonotoneCheck {
    let d = model.dimension();
    if d <= EXHAUSTIVE_MONOTONE_MAX_D {
        let table: Vec<bool> = (0..1u64 << d)
            .map(|c| model.evaluate(&Instance::from_code(c, d)))
            .collect();
        for code in 0..1u64 << d {
            if !table[code as usize] {
                continue;
            }
            // a 1 directly below a 0 breaks monotonicity
            for bit in 0..d {
                let up = code | (1 << bit);
                if up != code && !table[up as usize] {
                    return MonotoneCheck::Exhaustive {
                        violation: Some((
                            Instance::from_code(code, d),
                            Instance::from_code(up, d),
                        )),
                    };
                }
            }
        }
        return MonotoneCheck::Exhaustive { violation: None };
    }
    for _ in 0..pairs {
        let lo = Instance::new((0..d).map(|_| rng.gen_bool(0.5)).collect());
        let mut hi = lo.clone();
        for i in 0..d {
            if !hi.get(i) && rng.gen_bool(0.5) {
                hi.set(i, true);
            }
        }
        if model.evaluate(&lo) && !model.evaluate(&hi) {
            return MonotoneCheck::Sampled {
                pairs,
                violation: Some((lo, hi)),
            };
        }
    }
    MonotoneCheck::Sampled {
        pairs,
        violation: None,
    }
}
