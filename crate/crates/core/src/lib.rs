//! Secrecy outage analysis for NOMA networks assisted by a multi-functional
//! reconfigurable intelligent surface (MF-RIS), with STAR-RIS and active-RIS
//! baselines and a channel-level Monte Carlo simulator to check every closed
//! form against.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod channels;
pub mod linkmodel;
pub mod analysis;
pub mod montecarlo;
pub mod experiment;
pub mod numerics;

pub use error::{Error, Result};
