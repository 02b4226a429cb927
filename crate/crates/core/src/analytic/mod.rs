//! Closed-form average-age results, bounds and steady-state quantities.
//!
//! Every function is pure. Stability constraints are enforced with a relative
//! slack of [`STABILITY_SLACK`]: a formula evaluated at (or numerically on)
//! its boundary returns [`Error::Unstable`] instead of a huge number.

mod general;
mod hem1;
mod retrial;
mod tandem;
mod zero_wait;

pub use general::{
    correction_bounds, correction_term, correlation_floor, theorem1_combine, BoundInterval, CorrectionInputs,
};
pub use hem1::{
    hem1_aaoi, hem1_moments, hem1_rho, hem1_sigma, hem1_sigma_bisection, tandem_hetero_aaoi, Hem1Moments,
    InterDepartureDensity,
};
pub use retrial::{
    aaoi_mm11_nonpreemptive, retrial_aaoi, retrial_equivalent_zero_age_aaoi, retrial_orbit_metrics,
    retrial_steady_state, OrbitMetrics, RetrialSteadyState,
};
pub use tandem::{
    aaoi_mm1_fcfs, aaoi_tandem_two, tandem_chain_bounds, tandem_covariance, tandem_cross_moment,
    tandem_heuristic_estimate, TandemChainBounds,
};
pub use zero_wait::{zw_aaoi, zw_bound_width, zw_error_free_aaoi, zw_initial_age_mixture};

use crate::{Error, Result};

/// Minimum relative gap between a load and its stability limit.
pub const STABILITY_SLACK: f64 = 1e-9;

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be a finite positive rate, got {v}")))
    }
}

/// Requires `lhs < rhs` with relative slack.
pub(crate) fn strictly_below(lhs: f64, rhs: f64, condition: &str) -> Result<()> {
    if lhs < rhs * (1.0 - STABILITY_SLACK) {
        Ok(())
    } else {
        Err(Error::unstable(condition))
    }
}
