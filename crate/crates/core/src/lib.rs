//! Optimal design of performance indicators for a principal-agent relationship.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod cli;
pub mod continuous;
pub mod design;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod plot;
pub mod principal;

pub use error::{Error, Result};
