use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::stochastic::RngStream;
use crate::Result;

/// One point of the zero-wait correction-versus-error-rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub correction: f64,
    pub lb: f64,
    pub ub: f64,
    pub clamped_lb: f64,
}

pub fn bounds_sweep_zero_wait(mu: f64, alpha_grid: &[f64]) -> Result<Vec<SweepRow>> {
    alpha_grid
        .iter()
        .map(|&alpha| {
            let mix = analytic::zw_initial_age_mixture(alpha, mu)?;
            let b = analytic::correction_bounds(mix.mean(), mix.std_dev(), 1.0)?;
            Ok(SweepRow { alpha, correction: mix.mean(), lb: b.lower, ub: b.upper, clamped_lb: b.clamped().lower })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl ContainmentReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Draws `points` stable configurations of each of the two-queue tandem and
/// the zero-wait model and checks that the exact correction lies inside the
/// bound interval.
pub fn bounds_containment_sweep(points: usize, seed: u64) -> Result<ContainmentReport> {
    let mut rng = RngStream::new(seed, 0);
    let mut violations = Vec::new();
    for _ in 0..points {
        let lambda = 0.05 + 1.95 * rng.uniform();
        let gamma = lambda * (1.01 + 9.0 * rng.uniform());
        let mu = lambda * (1.01 + 9.0 * rng.uniform());
        let correction = lambda * analytic::tandem_cross_moment(lambda, gamma, mu)?;
        let m = 1.0 / (gamma - lambda);
        let b = analytic::correction_bounds(m, m, 1.0)?;
        if !b.contains(correction) {
            violations.push(format!("tandem-two lambda={lambda} gamma={gamma} mu={mu}: {correction} outside {b:?}"));
        }

        let alpha = 0.99 * rng.uniform();
        let mu = 0.1 + 9.9 * rng.uniform();
        let mix = analytic::zw_initial_age_mixture(alpha, mu)?;
        let correction = analytic::zw_aaoi(alpha, mu)? - analytic::zw_error_free_aaoi(mu)?;
        let b = analytic::correction_bounds(mix.mean(), mix.std_dev(), 1.0)?;
        // Equal to the mean up to rounding, which can land a hair outside a
        // zero-width interval.
        let slack = 1e-12 * (1.0 + correction.abs());
        if correction < b.lower - slack || correction > b.upper + slack {
            violations.push(format!("zero-wait alpha={alpha} mu={mu}: {correction} outside {b:?}"));
        }
    }
    Ok(ContainmentReport { checked: 2 * points, violations })
}
