// `!(a < b)` is the NaN-rejecting form used for argument checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clt;
pub mod counterexamples;
pub mod density;
pub mod error;
pub mod lemma;
pub mod numerics;
pub mod renyi;
pub mod report;
pub mod specfun;
pub mod young;

pub use error::{Error, Result};
