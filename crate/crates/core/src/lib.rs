//! Voting ensembles of decision stumps with margin-based and
//! dimension-based generalization bounds.

pub mod data;
pub mod dimension;
pub mod doomlp;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod lp;
pub mod margins;
pub mod plot;
pub mod rng;
pub mod stumps;

pub use error::{Error, Result};
