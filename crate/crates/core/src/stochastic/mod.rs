//! Random laws used by both the closed forms and the simulator.

mod dist;
mod lemmas;
mod rng;

pub use dist::{DistributionSpec, Law};
pub use lemmas::{
    exp_race_conditionals, hypoexp_vs_exp_conditionals, prob_exceeds_exp, ExpRace, HypoexpRace, JointDensity,
    SignedExpMix,
};
pub use rng::RngStream;

/// Densities that come out of signed-weight mixtures can dip a hair below zero
/// through cancellation; anything smaller than this in magnitude is zeroed.
pub(crate) const PDF_CLAMP: f64 = 1e-14;

pub(crate) fn clamp_density(v: f64) -> f64 {
    if v.abs() < PDF_CLAMP {
        0.0
    } else {
        v
    }
}
