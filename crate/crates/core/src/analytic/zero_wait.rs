use super::{positive, strictly_below};
use crate::stochastic::DistributionSpec;
use crate::{Error, Result};

fn check(alpha: f64, mu: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    positive("mu", mu)?;
    strictly_below(alpha, 1.0, "alpha < 1")
}

/// AAoI of the error-free zero-wait policy with exponential service.
pub fn zw_error_free_aaoi(mu: f64) -> Result<f64> {
    positive("mu", mu)?;
    Ok(2.0 / mu)
}

/// AAoI of zero-wait forwarding over a channel that drops each packet with
/// probability `alpha`.
pub fn zw_aaoi(alpha: f64, mu: f64) -> Result<f64> {
    check(alpha, mu)?;
    Ok(2.0 / (mu * (1.0 - alpha)))
}

/// Law of the initial age in the equivalent aged-updates model: the number of
/// failed attempts since the last success decides how many Exp(mu(1-alpha))
/// stages have elapsed.
pub fn zw_initial_age_mixture(alpha: f64, mu: f64) -> Result<DistributionSpec> {
    check(alpha, mu)?;
    if alpha == 0.0 {
        return Ok(DistributionSpec::zero());
    }
    let rate = mu * (1.0 - alpha);
    DistributionSpec::mixture(vec![
        ((1.0 - alpha) * (1.0 - alpha), DistributionSpec::zero()),
        (2.0 * alpha * (1.0 - alpha), DistributionSpec::exponential(rate)?),
        (alpha * alpha, DistributionSpec::erlang(2, rate)?),
    ])
}

/// Width `2 sigma_A` of the correction interval (unit coefficient of variation).
pub fn zw_bound_width(alpha: f64, mu: f64) -> Result<f64> {
    check(alpha, mu)?;
    Ok(2.0 * (2.0 * alpha * (2.0 - alpha)).sqrt() / (mu * (1.0 - alpha)))
}
