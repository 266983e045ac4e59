#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod counting;
pub mod eit;
pub mod error;
pub mod io;
pub mod model;
pub mod protocol;
pub mod qubit;
pub mod solver;
pub mod source;

pub use error::{Error, Result};
