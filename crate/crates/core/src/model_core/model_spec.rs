//! JSON model files.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::instance::Instance;
use super::models::{DecisionTree, Dictator, Dnf, Majority, ThresholdPlanted, TreeNodeRepr};
use super::oracle::{check_monotone, Model, MonotoneCheck, DEFAULT_SAMPLED_PAIRS};
use crate::error::{usage, Result};

/// A Boolean model description. Variable indices are 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Dnf {
        d: usize,
        terms: Vec<Vec<usize>>,
    },
    Dictator {
        d: usize,
        i: usize,
    },
    Majority {
        d: usize,
    },
    ThresholdPlanted {
        d: usize,
        #[serde(rename = "S")]
        s: usize,
        delta: usize,
        z: Instance,
    },
    DecisionTree {
        d: usize,
        tree: TreeNodeRepr,
    },
}

pub type SharedModel = Box<dyn Model + Send + Sync>;

fn shift(i: usize, what: &str) -> Result<usize> {
    i.checked_sub(1)
        .ok_or_else(|| usage(format!("{what} indices are 1-based; got 0")))
}

impl ModelSpec {
    pub fn dimension(&self) -> usize {
        match self {
            ModelSpec::Dnf { d, .. }
            | ModelSpec::Dictator { d, .. }
            | ModelSpec::Majority { d }
            | ModelSpec::ThresholdPlanted { d, .. }
            | ModelSpec::DecisionTree { d, .. } => *d,
        }
    }

    /// Build the evaluator without any monotonicity audit.
    pub fn build(&self) -> Result<SharedModel> {
        if self.dimension() == 0 {
            return Err(usage("dimension must be at least 1"));
        }
        Ok(match self {
            ModelSpec::Dnf { d, terms } => {
                let terms = terms
                    .iter()
                    .map(|t| t.iter().map(|&i| shift(i, "term")).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Box::new(Dnf::new(*d, terms)?)
            }
            ModelSpec::Dictator { d, i } => Box::new(Dictator::new(*d, shift(*i, "dictator")?)?),
            ModelSpec::Majority { d } => Box::new(Majority::new(*d)?),
            ModelSpec::ThresholdPlanted { d, s, delta, z } => {
                Box::new(ThresholdPlanted::new(*d, *s, *delta, z.bits().to_vec())?)
            }
            ModelSpec::DecisionTree { d, tree } => {
                Box::new(DecisionTree::new(*d, tree.clone().into_node()?)?)
            }
        })
    }

    /// Build and audit monotonicity: exhaustive (and rejecting) for
    /// `d <= 16`, sampled (warning only) above.
    pub fn build_checked<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SharedModel> {
        let model = self.build()?;
        match check_monotone(model.as_ref(), rng, DEFAULT_SAMPLED_PAIRS) {
            MonotoneCheck::Exhaustive { violation: Some((lo, hi)) } => {
                return Err(usage(format!(
                    "model is not monotone: f({lo}) = 1 but f({hi}) = 0"
                )));
            }
            MonotoneCheck::Sampled {
                violation: Some((lo, hi)),
                pairs,
            } => {
                log::warn!(
                    "sampled monotonicity audit ({pairs} pairs) found f({lo}) = 1 > f({hi}) = 0; results are not guaranteed"
                );
            }
            _ => {}
        }
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}
