//! Concrete model families used for testing and benchmarking.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::instance::Instance;
use super::oracle::Model;
use crate::error::{usage, Result};

/// Monotone DNF: a disjunction of conjunctions of positive literals.
/// `terms: []` is the constant 0, a term `[]` makes the function constant 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dnf {
    d: usize,
    terms: Vec<Vec<usize>>,
}

impl Dnf {
    /// `terms` use 0-based variable indices.
    pub fn new(d: usize, mut terms: Vec<Vec<usize>>) -> Result<Self> {
        if d == 0 {
            return Err(usage("dimension must be at least 1"));
        }
        for t in &mut terms {
            if let Some(&bad) = t.iter().find(|&&i| i >= d) {
                return Err(usage(format!("term variable {} out of range 1..={d}", bad + 1)));
            }
            t.sort_unstable();
            t.dedup();
        }
        Ok(Dnf { d, terms })
    }

    /// `x_1 ∧ … ∧ x_d`.
    pub fn and(d: usize) -> Self {
        Dnf {
            d,
            terms: vec![(0..d).collect()],
        }
    }

    /// `x_1 ∨ … ∨ x_d`.
    pub fn or(d: usize) -> Self {
        Dnf {
            d,
            terms: (0..d).map(|i| vec![i]).collect(),
        }
    }

    pub fn constant(d: usize, value: bool) -> Self {
        Dnf {
            d,
            terms: if value { vec![vec![]] } else { vec![] },
        }
    }

    /// Random monotone DNF with `n_terms` terms, each over a uniformly
    /// random variable subset of size `1..=max_width`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize, n_terms: usize, max_width: usize) -> Self {
        let max_width = max_width.clamp(1, d);
        let terms = (0..n_terms)
            .map(|_| {
                let w = rng.gen_range(1..=max_width);
                let mut t = sample(rng, d, w).into_vec();
                t.sort_unstable();
                t
            })
            .collect();
        Dnf { d, terms }
    }

    pub fn terms(&self) -> &[Vec<usize>] {
        &self.terms
    }
}

impl Model for Dnf {
    fn dimension(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &Instance) -> bool {
        self.terms.iter().any(|t| t.iter().all(|&i| x.get(i)))
    }
}

/// `f(x) = x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dictator {
    d: usize,
    i: usize,
}

impl Dictator {
    /// `i` is 0-based.
    pub fn new(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(usage(format!("dictator index {} out of range 1..={d}", i + 1)));
        }
        Ok(Dictator { d, i })
    }

    pub fn index(&self) -> usize {
        self.i
    }
}

impl Model for Dictator {
    fn dimension(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &Instance) -> bool {
        x.get(self.i)
    }
}

/// Strict majority over an odd number of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Majority {
    d: usize,
}

impl Majority {
    pub fn new(d: usize) -> Result<Self> {
        if d.is_multiple_of(2) {
            return Err(usage(format!("majority needs odd d, got {d}")));
        }
        Ok(Majority { d })
    }
}

impl Model for Majority {
    fn dimension(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &Instance) -> bool {
        2 * x.weight() > self.d
    }
}

/// The hidden-string threshold function: 1 iff at least `delta + 1` of the
/// first `s` coordinates are set, or the first `s` coordinates spell `z`.
/// From `0^d` its only counterfactual within distance `delta` is `z‖0^{d-s}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdPlanted {
    d: usize,
    s: usize,
    delta: usize,
    z: Vec<bool>,
}

impl ThresholdPlanted {
    pub fn new(d: usize, s: usize, delta: usize, z: Vec<bool>) -> Result<Self> {
        if delta == 0 {
            return Err(usage("planted threshold needs delta >= 1"));
        }
        if !(delta <= s && s <= d) {
            return Err(usage(format!(
                "planted threshold needs delta <= S <= d, got delta={delta}, S={s}, d={d}"
            )));
        }
        if z.len() != s {
            return Err(usage(format!("z has length {}, expected S={s}", z.len())));
        }
        let w = z.iter().filter(|&&b| b).count();
        if w != delta {
            return Err(usage(format!("z has weight {w}, expected delta={delta}")));
        }
        Ok(ThresholdPlanted { d, s, delta, z })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn z(&self) -> &[bool] {
        &self.z
    }

    /// `z‖0^{d-s}`.
    pub fn planted_point(&self) -> Instance {
        let mut bits = self.z.clone();
        bits.resize(self.d, false);
        Instance::new(bits)
    }
}

impl Model for ThresholdPlanted {
    fn dimension(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &Instance) -> bool {
        let head = &x.bits()[..self.s];
        head.iter().filter(|&&b| b).count() > self.delta || head == self.z.as_slice()
    }
}

/// A node of an explicit decision tree. Variables are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Leaf(bool),
    Internal {
        var: usize,
        lo: Box<TreeNode>,
        hi: Box<TreeNode>,
        /// Set where a fresh certificate block begins (materialized IDTs).
        block: Option<Vec<usize>>,
    },
}

impl TreeNode {
    pub fn internal(var: usize, lo: TreeNode, hi: TreeNode) -> Self {
        TreeNode::Internal {
            var,
            lo: Box::new(lo),
            hi: Box::new(hi),
            block: None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Internal { lo, hi, .. } => 1 + lo.depth().max(hi.depth()),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 1,
            TreeNode::Internal { lo, hi, .. } => lo.leaves() + hi.leaves(),
        }
    }

    pub fn eval(&self, x: &Instance) -> bool {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf(b) => return *b,
                TreeNode::Internal { var, lo, hi, .. } => {
                    node = if x.get(*var) { hi } else { lo };
                }
            }
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf(_) => None,
            TreeNode::Internal { var, lo, hi, .. } => {
                [Some(*var), lo.max_var(), hi.max_var()].into_iter().flatten().max()
            }
        }
    }

    fn repeats_on_path(&self, seen: &mut Vec<bool>) -> bool {
        match self {
            TreeNode::Leaf(_) => false,
            TreeNode::Internal { var, lo, hi, .. } => {
                if seen[*var] {
                    return true;
                }
                seen[*var] = true;
                let r = lo.repeats_on_path(seen) || hi.repeats_on_path(seen);
                seen[*var] = false;
                r
            }
        }
    }
}

/// A decision tree over `{0,1}^d`, used both as a model family and as the
/// materialized form of an implicit decision tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    d: usize,
    root: TreeNode,
}

impl DecisionTree {
    pub fn new(d: usize, root: TreeNode) -> Result<Self> {
        if let Some(v) = root.max_var() {
            if v >= d {
                return Err(usage(format!("tree variable {} out of range 1..={d}", v + 1)));
            }
        }
        if root.repeats_on_path(&mut vec![false; d]) {
            return Err(usage("a variable repeats on a root-to-leaf path"));
        }
        Ok(DecisionTree { d, root })
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }
}

impl Model for DecisionTree {
    fn dimension(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &Instance) -> bool {
        self.root.eval(x)
    }
}

/// JSON form of a tree node: `{"leaf":0|1}` or
/// `{"var":i,"lo":…,"hi":…}` with 1-based `var`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNodeRepr {
    Leaf {
        leaf: u8,
    },
    Internal {
        var: usize,
        lo: Box<TreeNodeRepr>,
        hi: Box<TreeNodeRepr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        block: Option<Vec<usize>>,
    },
}

impl TreeNodeRepr {
    pub fn into_node(self) -> Result<TreeNode> {
        match self {
            TreeNodeRepr::Leaf { leaf: 0 } => Ok(TreeNode::Leaf(false)),
            TreeNodeRepr::Leaf { leaf: 1 } => Ok(TreeNode::Leaf(true)),
            TreeNodeRepr::Leaf { leaf } => Err(usage(format!("leaf value must be 0 or 1, got {leaf}"))),
            TreeNodeRepr::Internal { var, lo, hi, block } => {
                if var == 0 {
                    return Err(usage("tree variables are 1-based"));
                }
                let block = match block {
                    Some(b) if b.contains(&0) => return Err(usage("block features are 1-based")),
                    Some(b) => Some(b.into_iter().map(|i| i - 1).collect()),
                    None => None,
                };
                Ok(TreeNode::Internal {
                    var: var - 1,
                    lo: Box::new(lo.into_node()?),
                    hi: Box::new(hi.into_node()?),
                    block,
                })
            }
        }
    }
}

impl From<&TreeNode> for TreeNodeRepr {
    fn from(node: &TreeNode) -> Self {
        match node {
            TreeNode::Leaf(b) => TreeNodeRepr::Leaf { leaf: *b as u8 },
            TreeNode::Internal { var, lo, hi, block } => TreeNodeRepr::Internal {
                var: var + 1,
                lo: Box::new(lo.as_ref().into()),
                hi: Box::new(hi.as_ref().into()),
                block: block.as_ref().map(|b| b.iter().map(|i| i + 1).collect()),
            },
        }
    }
}
