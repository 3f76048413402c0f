//! Invariants of real analytic plane curve germs.
//!
//! Exact computation of relative Newton polygons, order functions, Puiseux
//! data, real tree models and Fukui invariant sets, with decision procedures
//! for blow-analytic equivalence and a numeric companion for explicit
//! bi-Lipschitz conjugacies between weighted homogeneous germs.

pub mod arith;
pub mod polygon;
pub mod puiseux;
pub mod invariants;
pub mod numeric;
pub mod tree;

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GermError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("f is not mini-regular in x; apply mini_regularize first")]
    NotMiniRegular,
    #[error("insufficient truncation: need terms up to y^{required}")]
    InsufficientTruncation { required: String },
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("undetermined: {0}")]
    Undetermined(String),
}

pub type Result<T> = std::result::Result<T, GermError>;
