//! Implicit decision trees over monotone oracles.
//!
//! The tree is never built. A node is a restriction `ρ`; `is_leaf` asks
//! whether `f_ρ` is constant (two queries, by monotonicity) and `query`
//! names the feature tested at `ρ`. Features come in blocks: a block is a
//! certificate of `f_ρ` for the `ρ` where it was computed, carried along
//! the path as auxiliary information and consumed in ascending index
//! order. Once every feature of the block is fixed, the next `query`
//! computes a fresh certificate.

use std::cell::Cell;

use serde::Serialize;

use crate::certificates::{find_certificate_with, Polarity};
use crate::error::{invariant, Error, Result};
use crate::model_core::{DecisionTree, Instance, Oracle, Restriction, TreeNode};

/// The current certificate block, ascending. Consumption is implicit:
/// the consumed part is `block ∩ Dom(ρ)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuxInfo {
    block: Vec<usize>,
}

impl AuxInfo {
    pub fn new(mut block: Vec<usize>) -> Self {
        block.sort_unstable();
        block.dedup();
        AuxInfo { block }
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    /// Whether every block feature is already fixed by `rho`.
    pub fn exhausted(&self, rho: &Restriction) -> bool {
        self.block.iter().all(|&i| rho.is_fixed(i))
    }
}

/// Call and query accounting for the IDT operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IdtStats {
    pub is_leaf_calls: u64,
    pub query_calls: u64,
    pub refills: u64,
    /// Most oracle queries spent by a single `is_leaf`.
    pub max_is_leaf_queries: u64,
    /// Most oracle queries spent by a single refilling `query`. Other
    /// `query` calls spend none.
    pub max_refill_queries: u64,
}

impl IdtStats {
    pub fn calls(&self) -> u64 {
        self.is_leaf_calls + self.query_calls
    }
}

/// `2·s² + s`: the default depth cap for a sensitivity bound `s`.
pub fn depth_cap_for(s_bound: usize) -> usize {
    2 * s_bound * s_bound + s_bound
}

/// IDT operations bound to one oracle.
pub struct Idt<'o, 'm> {
    oracle: &'o Oracle<'m>,
    polarity: Polarity,
    depth_cap: Option<usize>,
    stats: Cell<IdtStats>,
}

impl<'o, 'm> Idt<'o, 'm> {
    pub fn new(oracle: &'o Oracle<'m>) -> Self {
        Idt {
            oracle,
            polarity: Polarity::Minterm,
            depth_cap: None,
            stats: Cell::new(IdtStats::default()),
        }
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = polarity;
        self
    }

    /// Paths longer than `cap` are reported as invariant violations.
    pub fn with_depth_cap(mut self, cap: Option<usize>) -> Self {
        self.depth_cap = cap;
        self
    }

    pub fn oracle(&self) -> &'o Oracle<'m> {
        self.oracle
    }

    pub fn depth_cap(&self) -> Option<usize> {
        self.depth_cap
    }

    pub fn stats(&self) -> IdtStats {
        self.stats.get()
    }

    fn update(&self, f: impl FnOnce(&mut IdtStats)) {
        let mut s = self.stats.get();
        f(&mut s);
        self.stats.set(s);
    }

    /// `Some(v)` if `f_ρ ≡ v`, `None` if `f_ρ` is non-constant. Two queries.
    pub fn leaf_value(&self, rho: &Restriction, _aux: &AuxInfo) -> Option<bool> {
        let before = self.oracle.count();
        let d = self.oracle.dimension();
        let lo = self.oracle.query(&rho.apply(&Instance::zeros(d)));
        let hi = self.oracle.query(&rho.apply(&Instance::ones(d)));
        let spent = self.oracle.count() - before;
        self.update(|s| {
            s.is_leaf_calls += 1;
            s.max_is_leaf_queries = s.max_is_leaf_queries.max(spent);
        });
        (lo == hi).then_some(hi)
    }

    pub fn is_leaf(&self, rho: &Restriction, aux: &AuxInfo) -> bool {
        self.leaf_value(rho, aux).is_some()
    }

    /// The feature tested at the non-leaf `ρ`, and the auxiliary
    /// information to hand to both children.
    pub fn query(&self, rho: &Restriction, aux: &AuxInfo) -> Result<(usize, AuxInfo)> {
        let before = self.oracle.count();
        if let Some(&next) = aux.block.iter().find(|&&i| !rho.is_fixed(i)) {
            self.update(|s| s.query_calls += 1);
            return Ok((next, aux.clone()));
        }
        let cert = find_certificate_with(self.oracle, rho, self.polarity)?;
        let spent = self.oracle.count() - before;
        self.update(|s| {
            s.query_calls += 1;
            s.refills += 1;
            s.max_refill_queries = s.max_refill_queries.max(spent);
        });
        let fresh = AuxInfo::new(cert.features);
        match fresh.block.iter().find(|&&i| !rho.is_fixed(i)) {
            Some(&first) => Ok((first, fresh)),
            None => Err(invariant(format!(
                "certificate for non-leaf restriction {rho} has no free feature"
            ))),
        }
    }

    pub(crate) fn check_depth(&self, rho: &Restriction) -> Result<()> {
        match self.depth_cap {
            Some(cap) if rho.domain_size() > cap => Err(invariant(format!(
                "IDT path {rho} is deeper than the cap {cap}"
            ))),
            _ => Ok(()),
        }
    }
}

/// The root-to-leaf path of one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub leaf: Restriction,
    pub value: bool,
    /// Features in the order they were tested.
    pub features: Vec<usize>,
    /// Index into `features` where each certificate block starts.
    pub block_starts: Vec<usize>,
}

/// Follow `x` from the root to its leaf.
pub fn walk(idt: &Idt, x: &Instance) -> Result<Walk> {
    let d = idt.oracle().dimension();
    if x.len() != d {
        return Err(Error::Usage(format!(
            "instance has length {}, model dimension is {d}",
            x.len()
        )));
    }
    let mut rho = Restriction::empty(d);
    let mut aux = AuxInfo::default();
    let mut features = Vec::new();
    let mut block_starts = Vec::new();
    loop {
        if let Some(value) = idt.leaf_value(&rho, &aux) {
            return Ok(Walk {
                leaf: rho,
                value,
                features,
                block_starts,
            });
        }
        let (i, next) = idt.query(&rho, &aux)?;
        if aux.exhausted(&rho) {
            block_starts.push(features.len());
        }
        features.push(i);
        rho.set(i, x.get(i));
        aux = next;
        idt.check_depth(&rho)?;
    }
}

/// Largest dimension [`materialize`] accepts.
pub const MATERIALIZE_MAX_D: usize = 16;

/// Expand the whole IDT. Internal nodes where a new block begins carry the
/// block in their `block` field.
pub fn materialize(idt: &Idt) -> Result<DecisionTree> {
    let d = idt.oracle().dimension();
    if d > MATERIALIZE_MAX_D {
        return Err(Error::Capability(format!(
            "materialization needs d <= {MATERIALIZE_MAX_D}, got {d}"
        )));
    }
    let root = expand(idt, &Restriction::empty(d), &AuxInfo::default())?;
    DecisionTree::new(d, root)
}

fn expand(idt: &Idt, rho: &Restriction, aux: &AuxInfo) -> Result<TreeNode> {
    idt.check_depth(rho)?;
    if let Some(v) = idt.leaf_value(rho, aux) {
        return Ok(TreeNode::Leaf(v));
    }
    let (i, next) = idt.query(rho, aux)?;
    let block = aux.exhausted(rho).then(|| next.block().to_vec());
    Ok(TreeNode::Internal {
        var: i,
        lo: Box::new(expand(idt, &rho.with(i, false), &next)?),
        hi: Box::new(expand(idt, &rho.with(i, true), &next)?),
        block,
    })
}
