//! Induction motor terminal-fault simulation and fault detection by dynamic
//! state estimation with a chi-squared consistency test.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dse;
pub mod error;
pub mod frame;
pub mod motor;
pub mod pipeline;
pub mod report;
pub mod sim;

pub use error::{Error, Result};
