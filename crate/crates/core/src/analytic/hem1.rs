//! Queue fed by two-stage hypoexponential inter-arrivals `Exp(lambda)` then
//! `Exp(gamma)`, with a single exponential server of rate `mu`.

use serde::{Deserialize, Serialize};

use super::{positive, strictly_below};
use crate::stochastic::{clamp_density, SignedExpMix};
use crate::{Error, Result};

fn check(lambda: f64, gamma: f64, mu: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    positive("gamma", gamma)?;
    positive("mu", mu)?;
    let rho = lambda * gamma / (mu * (lambda + gamma));
    strictly_below(rho, 1.0, "rho = lambda gamma / (mu (lambda + gamma)) < 1")?;
    Ok(rho)
}

/// Server utilisation.
pub fn hem1_rho(lambda: f64, gamma: f64, mu: f64) -> Result<f64> {
    check(lambda, gamma, mu)
}

/// Probability that an arrival finds the server busy: the root in (0, 1) of
/// `s = X(mu - mu s)` where `X` is the inter-arrival transform.
///
/// The quadratic root is computed in its cancellation-free form and then
/// checked against [`hem1_sigma_bisection`].
pub fn hem1_sigma(lambda: f64, gamma: f64, mu: f64) -> Result<f64> {
    let sigma = sigma_closed(lambda, gamma, mu)?;
    let other = hem1_sigma_bisection(lambda, gamma, mu)?;
    if (sigma - other).abs() > 1e-10 {
        return Err(Error::NumericalMismatch(format!("closed-form root {sigma} disagrees with bisection {other}")));
    }
    Ok(sigma)
}

fn sigma_closed(lambda: f64, gamma: f64, mu: f64) -> Result<f64> {
    check(lambda, gamma, mu)?;
    let l = lambda + gamma + mu;
    let disc = (l * l - 4.0 * lambda * gamma).max(0.0);
    Ok(2.0 * lambda * gamma / (mu * (l + disc.sqrt())))
}

fn arrival_lst(lambda: f64, gamma: f64, s: f64) -> f64 {
    (lambda / (lambda + s)) * (gamma / (gamma + s))
}

/// Bisection on the fixed-point equation, independent of the closed form.
pub fn hem1_sigma_bisection(lambda: f64, gamma: f64, mu: f64) -> Result<f64> {
    check(lambda, gamma, mu)?;
    // g is concave with g(0) < 0 and g(1) = 0, so it is positive just below
    // one exactly when the second root lies inside (0, 1).
    let g = |s: f64| s - arrival_lst(lambda, gamma, mu * (1.0 - s));
    let mut eps = 0.5;
    while g(1.0 - eps) <= 0.0 {
        eps *= 0.5;
        if eps < 1e-15 {
            return Err(Error::NumericalMismatch("bisection could not bracket the root".into()));
        }
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0 - eps);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Zero-age AAoI of the HE/M/1 queue. Valid for `gamma == lambda`.
pub fn hem1_aaoi(lambda: f64, gamma: f64, mu: f64) -> Result<f64> {
    let rho = check(lambda, gamma, mu)?;
    let s = hem1_sigma(lambda, gamma, mu)?;
    Ok(1.0 / lambda + 1.0 / gamma + 1.0 / mu + s * rho / (mu - mu * s) - (1.0 - s * s) / (lambda + gamma))
}

/// AAoI at the end of a blocking M/M/1/1 queue of rate `gamma` feeding an
/// infinite FCFS queue of rate `mu`. The second queue sees hypoexponential
/// arrivals and each packet enters it with its first service time as age.
pub fn tandem_hetero_aaoi(lambda: f64, gamma: f64, mu: f64) -> Result<f64> {
    Ok(hem1_aaoi(lambda, gamma, mu)? + 1.0 / gamma)
}

/// Density `a_mu mu e^{-mu y} + a_lambda lambda e^{-lambda y} + a_gamma gamma e^{-gamma y}`
/// of the inter-departure time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterDepartureDensity {
    pub lambda: f64,
    pub gamma: f64,
    pub mu: f64,
    pub a_mu: f64,
    pub a_lambda: f64,
    pub a_gamma: f64,
}

impl InterDepartureDensity {
    fn terms(&self) -> [(f64, f64); 3] {
        [(self.a_mu, self.mu), (self.a_lambda, self.lambda), (self.a_gamma, self.gamma)]
    }

    pub fn pdf(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        clamp_density(self.terms().iter().map(|&(a, r)| a * r * (-r * y).exp()).sum())
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let survival: f64 = self.terms().iter().map(|&(a, r)| a * (-r * y).exp()).sum();
        (1.0 - survival).clamp(0.0, 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.terms().iter().map(|&(a, r)| a / r).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.terms().iter().map(|&(a, r)| 2.0 * a / (r * r)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hem1Moments {
    pub sigma: f64,
    pub mean_y: f64,
    pub second_moment_y: f64,
    /// `E[Y_n T_{n-1}]`.
    pub cross_yt: f64,
    pub pdf_y: InterDepartureDensity,
    /// Residual inter-arrival time seen from a departure that empties the
    /// queue.
    pub residual_pdf: SignedExpMix,
}

pub fn hem1_moments(lambda: f64, gamma: f64, mu: f64) -> Result<Hem1Moments> {
    check(lambda, gamma, mu)?;
    for (a, b, what) in [(lambda, gamma, "gamma = lambda"), (gamma, mu, "gamma = mu"), (lambda, mu, "lambda = mu")] {
        if (a - b).abs() <= 1e-12 * a.max(b) {
            return Err(Error::Degenerate(format!("moment formulas need distinct rates, got {what}")));
        }
    }
    let sigma = hem1_sigma(lambda, gamma, mu)?;
    let nu = mu * (1.0 - sigma);
    let w = gamma * (gamma + nu) / ((gamma - lambda) * (lambda + gamma + nu));
    let a_lambda = (1.0 - sigma) * w * mu / (mu - lambda);
    let a_gamma = (1.0 - sigma) * (1.0 - w) * mu / (mu - gamma);
    let pdf_y = InterDepartureDensity { lambda, gamma, mu, a_mu: 1.0 - a_lambda - a_gamma, a_lambda, a_gamma };
    let ex2 = 2.0 * (1.0 / (lambda * lambda) + 1.0 / (lambda * gamma) + 1.0 / (gamma * gamma));
    let cross_yt = 1.0 / (mu * nu)
        + ((gamma / lambda) * nu / ((nu + lambda) * (nu + lambda))
            - (lambda / gamma) * nu / ((nu + gamma) * (nu + gamma)))
            / (gamma - lambda);
    Ok(Hem1Moments {
        sigma,
        mean_y: 1.0 / lambda + 1.0 / gamma,
        second_moment_y: ex2 + 2.0 * sigma / (lambda * gamma),
        cross_yt,
        pdf_y,
        residual_pdf: SignedExpMix { weight: w, rate_a: lambda, rate_b: gamma },
    })
}
