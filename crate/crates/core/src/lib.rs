//! Age of Information for single-server queues whose packets arrive already
//! aged.
//!
//! The crate pairs every closed-form average-age result it implements
//! ([`analytic`]) with a deterministic discrete-event simulator ([`sim`]) that
//! measures the same quantity from the age sawtooth, so each formula can be
//! checked against an independent estimate. [`scenarios`] binds the two
//! together into reproducible experiments and [`stochastic`] provides the
//! random laws both sides rely on.

pub mod analytic;
#[cfg(feature = "cli")]
pub mod cli;
mod error;
pub mod scenarios;
pub mod sim;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};

/// Default seed used whenever neither a flag nor `AOI_LAB_SEED` provides one.
pub const DEFAULT_SEED: u64 = 0x005E_EDA0_11AB;
