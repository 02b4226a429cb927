//! Deterministic discrete-event simulation of the monitored systems.
//!
//! Feed-forward systems are advanced packet by packet with the Lindley
//! recursion; the retrial queue uses an event list. Every run streams its
//! departures through an [`Observer`] that integrates the age sawtooth
//! exactly and collects the moments needed by the aged-updates formula, with
//! batch-means standard errors.

mod events;
mod nodes;
mod observer;
mod record;
mod runs;
mod theorem1;

pub use events::{Event, EventKind, EventQueue};
pub use nodes::{AgeFeed, NodeModel};
pub use observer::{AgeAccumulator, Delivery, Fields, Observer, RunSamples, RunStatistics, BATCHES};
pub use record::{age_path, age_vertices, sig12, sig_digits, trapezoid, write_log_csv, PacketRecord};
pub use runs::{
    default_warmup, replicate, replicate_streams, run_hetero_tandem, run_retrial, run_single_node, run_tandem,
    run_zero_wait, RetrialExtras, RunConfig, RunOutput, OCCUPANCY_LEVELS,
};
pub use theorem1::{estimate_theorem1_terms, Pairing, Theorem1Terms};
