use serde::{Deserialize, Serialize};

use super::{positive, strictly_below, BoundInterval};
use crate::Result;

/// Zero-age AAoI of the M/M/1 FCFS queue.
pub fn aaoi_mm1_fcfs(lambda: f64, mu: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    positive("mu", mu)?;
    strictly_below(lambda, mu, "lambda < mu")?;
    Ok(1.0 / lambda + 1.0 / mu + (lambda * lambda / (mu * mu)) / (mu - lambda))
}

/// `E[Y_n^(2) T_{n-1}^(1)]` for two M/M/1 queues in tandem: the final
/// inter-departure time against the previous packet's time in the first queue.
pub fn tandem_cross_moment(lambda: f64, gamma: f64, mu: f64) -> Result<f64> {
    two_queue_checks(lambda, gamma, mu)?;
    Ok(1.0 / (gamma * lambda)
        + (lambda / (gamma * gamma)) / (gamma - lambda)
        + (lambda / (gamma * mu)) / (gamma + mu - lambda))
}

/// `Cov(Y_n^(C+1), T_{n-1}^(C))` between adjacent stations; negative whenever
/// both queues are stable.
pub fn tandem_covariance(lambda: f64, gamma_c: f64, gamma_next: f64) -> Result<f64> {
    two_queue_checks(lambda, gamma_c, gamma_next)?;
    let sum = gamma_c + gamma_next;
    Ok((1.0 / (gamma_c * gamma_c)) * sum * (lambda - gamma_next) / (gamma_next * (sum - lambda)))
}

/// AAoI at the output of M/M/1 -> M/M/1 with service rates `gamma` then `mu`.
pub fn aaoi_tandem_two(lambda: f64, gamma: f64, mu: f64) -> Result<f64> {
    two_queue_checks(lambda, gamma, mu)?;
    let l2 = lambda * lambda;
    Ok(1.0 / lambda
        + 1.0 / mu
        + (l2 / (mu * mu)) / (mu - lambda)
        + 1.0 / gamma
        + (l2 / (gamma * gamma)) / (gamma - lambda)
        + (l2 / (gamma * mu)) / (gamma + mu - lambda))
}

fn two_queue_checks(lambda: f64, gamma: f64, mu: f64) -> Result<()> {
    positive("lambda", lambda)?;
    positive("gamma", gamma)?;
    positive("mu", mu)?;
    strictly_below(lambda, gamma, "lambda < gamma")?;
    strictly_below(lambda, mu, "lambda < mu")
}

/// Interval for the AAoI at the end of a chain of M/M/1 queues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TandemChainBounds {
    /// Zero-age AAoI of the final queue alone.
    pub delta0: f64,
    /// Mean age on entry to the final queue (sum of upstream sojourn means).
    pub mean_age: f64,
    pub sd_age: f64,
    /// `delta0 + mean_age +- sd_age`; inter-departures are Poisson so the
    /// coefficient of variation is one.
    pub interval: BoundInterval,
}

pub fn tandem_chain_bounds(lambda: f64, prior_rates: &[f64], mu_last: f64) -> Result<TandemChainBounds> {
    let delta0 = aaoi_mm1_fcfs(lambda, mu_last)?;
    let mut mean_age = 0.0;
    let mut var_age = 0.0;
    for (i, &g) in prior_rates.iter().enumerate() {
        positive("prior rate", g)?;
        strictly_below(lambda, g, &format!("lambda < gamma_{}", i + 1))?;
        let m = 1.0 / (g - lambda);
        mean_age += m;
        var_age += m * m;
    }
    let sd_age = var_age.sqrt();
    let centre = delta0 + mean_age;
    Ok(TandemChainBounds {
        delta0,
        mean_age,
        sd_age,
        interval: BoundInterval { lower: centre - sd_age, upper: centre + sd_age },
    })
}

/// Point estimate `0.55 lb + 0.45 ub`, leaning to the lower end because the
/// correlation in M/M/1 chains is negative. Not validated beyond that case.
pub fn tandem_heuristic_estimate(interval: &BoundInterval) -> f64 {
    0.55 * interval.lower + 0.45 * interval.upper
}
