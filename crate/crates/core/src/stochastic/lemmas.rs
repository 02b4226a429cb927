//! Conditional laws of races between exponential and hypoexponential clocks.
//!
//! These are the building blocks behind the tandem cross-moment and the
//! HE/M/1 inter-departure density; each is checked against conditional Monte
//! Carlo in the crate's tests.

use super::{clamp_density, DistributionSpec};
use crate::{Error, Result};

/// `P(X > Y)` for `X ~ Exp(lambda)` independent of `Y`, which is the transform
/// of `Y` evaluated at `lambda`.
pub fn prob_exceeds_exp(lambda: f64, y: &DistributionSpec) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    Ok(y.lst(lambda))
}

/// Conditional laws for `X1 ~ Exp(l1)`, `X2 ~ Exp(l2)` given `X2 > X1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpRace {
    /// `P(X2 > X1)`.
    pub p_win: f64,
    /// `X1 | X2 > X1`.
    pub winner_given_win: DistributionSpec,
    /// `(X2 - X1) | X2 > X1`, independent of the winner's value.
    pub gap_given_win: DistributionSpec,
    /// `X2 | X2 > X1`: the winner's time followed by the gap, i.e. stages
    /// `(l1 + l2, l2)`.
    pub loser_given_win: DistributionSpec,
}

pub fn exp_race_conditionals(l1: f64, l2: f64) -> Result<ExpRace> {
    for (name, r) in [("lambda1", l1), ("lambda2", l2)] {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid(format!("{name} must be positive, got {r}")));
        }
    }
    let sum = l1 + l2;
    Ok(ExpRace {
        p_win: l1 / sum,
        winner_given_win: DistributionSpec::exponential(sum)?,
        gap_given_win: DistributionSpec::exponential(l2)?,
        loser_given_win: DistributionSpec::hypoexponential(&[sum, l2])?,
    })
}

/// Density `w a e^{-a x} + (1 - w) b e^{-b x}` with a possibly signed weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedExpMix {
    pub weight: f64,
    pub rate_a: f64,
    pub rate_b: f64,
}

impl SignedExpMix {
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let v = self.weight * self.rate_a * (-self.rate_a * x).exp()
            + (1.0 - self.weight) * self.rate_b * (-self.rate_b * x).exp();
        clamp_density(v)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let survival = self.weight * (-self.rate_a * x).exp() + (1.0 - self.weight) * (-self.rate_b * x).exp();
        (1.0 - survival).clamp(0.0, 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.weight / self.rate_a + (1.0 - self.weight) / self.rate_b
    }
}

/// Joint density of `(Z, X) | Y > X` for the hypoexponential race.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDensity {
    weight: f64,
    lambda: f64,
    mu1: f64,
    mu2: f64,
}

impl JointDensity {
    pub fn pdf(&self, z: f64, x: f64) -> f64 {
        if z < 0.0 || x < 0.0 {
            return 0.0;
        }
        let (l, m1, m2, w) = (self.lambda, self.mu1, self.mu2, self.weight);
        let v = w * m1 * (-m1 * z).exp() * (l + m1) * (-(l + m1) * x).exp()
            + (1.0 - w) * m2 * (-m2 * z).exp() * (l + m2) * (-(l + m2) * x).exp();
        clamp_density(v)
    }
}

/// Conditional laws for `X ~ Exp(lambda)` racing `Y ~ Hypoexp(mu1, mu2)`,
/// conditioned on `Y > X`, with overshoot `Z = Y - X`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypoexpRace {
    /// `P(Y > X)`.
    pub p_exceed: f64,
    /// Signed mixing weight; it can exceed one.
    pub weight: f64,
    /// Density of `Z | Y > X`.
    pub overshoot: SignedExpMix,
    /// Density of `X | Y > X`.
    pub arrival: SignedExpMix,
    pub joint: JointDensity,
}

pub fn hypoexp_vs_exp_conditionals(lambda: f64, mu1: f64, mu2: f64) -> Result<HypoexpRace> {
    for (name, r) in [("lambda", lambda), ("mu1", mu1), ("mu2", mu2)] {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid(format!("{name} must be positive, got {r}")));
        }
    }
    if mu1 == mu2 {
        return Err(Error::Degenerate(format!(
            "hypoexponential race needs distinct stage rates, got mu1 = mu2 = {mu1}"
        )));
    }
    let total = lambda + mu1 + mu2;
    let weight = mu2 * (lambda + mu2) / ((mu2 - mu1) * total);
    Ok(HypoexpRace {
        p_exceed: lambda * total / ((lambda + mu1) * (lambda + mu2)),
        weight,
        overshoot: SignedExpMix { weight, rate_a: mu1, rate_b: mu2 },
        arrival: SignedExpMix { weight, rate_a: lambda + mu1, rate_b: lambda + mu2 },
        joint: JointDensity { weight, lambda, mu1, mu2 },
    })
}
