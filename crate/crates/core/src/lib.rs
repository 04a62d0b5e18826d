//! Exact optimal counterfactual explanations for monotone black-box
//! classifiers.
//!
//! The search walks an implicit decision tree whose nodes are computed on
//! demand from oracle queries, so no explicit model representation is
//! needed. See [`find_optimal`] for the Boolean entry point and
//! [`general::find_optimal_general`] for ordered non-binary features.

pub mod baselines;
pub mod bench;
pub mod certificates;
pub mod cli;
pub mod counterfactual;
pub mod error;
pub mod general;
pub mod idt;
pub mod model_core;

pub use certificates::{find_certificate, Certificate, Polarity};
pub use counterfactual::{find_minimal, find_optimal, CounterfactualReport, SearchConfig};
pub use error::{Error, Result};
pub use idt::{AuxInfo, Idt};
pub use model_core::{Instance, Model, ModelSpec, Oracle, Restriction};
