#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod ftr_channel;
pub mod monte_carlo;
pub mod secrecy_engine;
pub mod specfun;

pub use error::{Error, Result};
