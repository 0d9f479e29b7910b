//! Exact evaluation of averaged short correlations
//! `Σ_{a≤H} Σ_{x<n≤x+h} f(n)·g(n−a)`, their main-term decompositions and the
//! empirical size of the remainders.
//!
//! All sums are carried out over exact complex rationals ([`Scalar`]); floating
//! point only appears when a remainder is normalized for reporting.

pub mod arith;
pub mod error;
pub mod pinch;
pub mod scalar;
pub mod sums;
pub mod verify;

pub use arith::{
    ArithmeticFunction, Builtin, FunctionSpec, FunctionTable, FunctionWindow, RandomFunction,
    SieveFunction,
};
pub use error::{Error, Result};
pub use pinch::{DecompositionReport, Identity};
pub use scalar::Scalar;
pub use sums::ParameterTuple;
pub use verify::{GridConfig, GridReport};
