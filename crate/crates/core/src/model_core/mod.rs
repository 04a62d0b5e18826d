//! Feature-cube primitives, the query-counted oracle, and the model zoo.

pub mod instance;
pub mod model_spec;
pub mod models;
pub mod oracle;

pub use instance::{delta, one_based, overwrite, Instance, Restriction};
pub use model_spec::{ModelSpec, SharedModel};
pub use models::{DecisionTree, Dictator, Dnf, Majority, ThresholdPlanted, TreeNode, TreeNodeRepr};
pub use oracle::{
    check_monotone, truth_table, Model, MonotoneCheck, Oracle, QueryLedger, RestrictedModel,
};
