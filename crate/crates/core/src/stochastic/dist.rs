use serde::{Deserialize, Serialize};

use super::{clamp_density, RngStream};
use crate::{Error, Result};

/// The shape of a nonnegative random law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Law {
    Exponential {
        rate: f64,
    },
    Erlang {
        shape: u32,
        rate: f64,
    },
    /// Sum of independent exponentials with pairwise distinct rates.
    Hypoexponential {
        rates: Vec<f64>,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<DistributionSpec>,
    },
    PointMass {
        value: f64,
    },
}

/// A validated nonnegative random law with exact moments and transform.
///
/// Construction is the only place parameters are checked; every method on a
/// built value is total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Law", into = "Law")]
pub struct DistributionSpec {
    law: Law,
}

fn check_rate(rate: f64, what: &str) -> Result<()> {
    if rate.is_finite() && rate > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be a finite positive rate, got {rate}")))
    }
}

impl DistributionSpec {
    pub fn exponential(rate: f64) -> Result<Self> {
        check_rate(rate, "exponential rate")?;
        Ok(Self { law: Law::Exponential { rate } })
    }

    pub fn erlang(shape: u32, rate: f64) -> Result<Self> {
        check_rate(rate, "erlang rate")?;
        if shape == 0 {
            return Err(Error::invalid("erlang shape must be at least 1"));
        }
        Ok(Self { law: Law::Erlang { shape, rate } })
    }

    /// Sum of independent exponential stages, in the order given.
    ///
    /// A single rate yields an exponential and all-equal rates yield an Erlang.
    /// Lists mixing repeated and distinct rates are rejected because the
    /// distinct-rate density no longer applies.
    pub fn hypoexponential(rates: &[f64]) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::invalid("hypoexponential needs at least one rate"));
        }
        for &r in rates {
            check_rate(r, "hypoexponential rate")?;
        }
        if rates.len() == 1 {
            return Self::exponential(rates[0]);
        }
        if rates.iter().all(|&r| r == rates[0]) {
            return Self::erlang(rates.len() as u32, rates[0]);
        }
        for (i, a) in rates.iter().enumerate() {
            if rates[i + 1..].contains(a) {
                return Err(Error::Degenerate(format!(
                    "hypoexponential rates must be pairwise distinct or all equal: {rates:?}"
                )));
            }
        }
        Ok(Self { law: Law::Hypoexponential { rates: rates.to_vec() } })
    }

    pub fn mixture(parts: Vec<(f64, DistributionSpec)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("mixture weights must be nonnegative"));
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("mixture weights sum to {total}, not 1")));
        }
        let (weights, components) = parts.into_iter().unzip();
        Ok(Self { law: Law::Mixture { weights, components } })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::invalid(format!("point mass must be at a finite value >= 0, got {value}")));
        }
        Ok(Self { law: Law::PointMass { value } })
    }

    /// The point mass at zero.
    pub fn zero() -> Self {
        Self { law: Law::PointMass { value: 0.0 } }
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    pub fn mean(&self) -> f64 {
        match &self.law {
            Law::Exponential { rate } => 1.0 / rate,
            Law::Erlang { shape, rate } => *shape as f64 / rate,
            Law::Hypoexponential { rates } => rates.iter().map(|r| 1.0 / r).sum(),
            Law::Mixture { weights, components } => weights.iter().zip(components).map(|(w, c)| w * c.mean()).sum(),
            Law::PointMass { value } => *value,
        }
    }

    pub fn second_moment(&self) -> f64 {
        match &self.law {
            Law::Exponential { rate } => 2.0 / (rate * rate),
            Law::Erlang { shape, rate } => {
                let k = *shape as f64;
                k * (k + 1.0) / (rate * rate)
            }
            Law::Hypoexponential { rates } => {
                let m = self.mean();
                let v: f64 = rates.iter().map(|r| 1.0 / (r * r)).sum();
                v + m * m
            }
            Law::Mixture { weights, components } => {
                weights.iter().zip(components).map(|(w, c)| w * c.second_moment()).sum()
            }
            Law::PointMass { value } => value * value,
        }
    }

    pub fn variance(&self) -> f64 {
        match &self.law {
            Law::Exponential { rate } => 1.0 / (rate * rate),
            Law::Erlang { shape, rate } => *shape as f64 / (rate * rate),
            Law::Hypoexponential { rates } => rates.iter().map(|r| 1.0 / (r * r)).sum(),
            Law::PointMass { .. } => 0.0,
            Law::Mixture { .. } => {
                let m = self.mean();
                (self.second_moment() - m * m).max(0.0)
            }
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Laplace-Stieltjes transform `E[exp(-s X)]` for `s >= 0`.
    pub fn lst(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 1.0;
        }
        match &self.law {
            Law::Exponential { rate } => rate / (rate + s),
            Law::Erlang { shape, rate } => (rate / (rate + s)).powi(*shape as i32),
            Law::Hypoexponential { rates } => rates.iter().map(|r| r / (r + s)).product(),
            Law::Mixture { weights, components } => weights.iter().zip(components).map(|(w, c)| w * c.lst(s)).sum(),
            Law::PointMass { value } => (-s * value).exp(),
        }
    }

    /// Density of the absolutely continuous part; point masses contribute
    /// nothing here (see [`DistributionSpec::atom`]).
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match &self.law {
            Law::Exponential { rate } => rate * (-rate * x).exp(),
            Law::Erlang { shape, rate } => {
                let k = *shape as i32;
                let log_fact: f64 = (1..k).map(|i| (i as f64).ln()).sum();
                if x == 0.0 {
                    return if k == 1 { *rate } else { 0.0 };
                }
                (k as f64 * rate.ln() + (k - 1) as f64 * x.ln() - rate * x - log_fact).exp()
            }
            Law::Hypoexponential { rates } => {
                let v: f64 = hypo_coefficients(rates).zip(rates).map(|(c, r)| c * r * (-r * x).exp()).sum();
                clamp_density(v).max(0.0)
            }
            Law::Mixture { weights, components } => weights.iter().zip(components).map(|(w, c)| w * c.pdf(x)).sum(),
            Law::PointMass { .. } => 0.0,
        }
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match &self.law {
            Law::Exponential { rate } => -(-rate * x).exp_m1(),
            Law::Erlang { shape, rate } => {
                let rx = rate * x;
                let mut term = 1.0;
                let mut tail = 1.0;
                for n in 1..*shape {
                    term *= rx / n as f64;
                    tail += term;
                }
                (1.0 - (-rx).exp() * tail).clamp(0.0, 1.0)
            }
            Law::Hypoexponential { .. } if x == 0.0 => 0.0,
            Law::Hypoexponential { rates } => {
                let survival: f64 = hypo_coefficients(rates).zip(rates).map(|(c, r)| c * (-r * x).exp()).sum();
                (1.0 - survival).clamp(0.0, 1.0)
            }
            Law::Mixture { weights, components } => weights.iter().zip(components).map(|(w, c)| w * c.cdf(x)).sum(),
            Law::PointMass { value } => {
                if x >= *value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Probability mass sitting exactly at `x`.
    pub fn atom(&self, x: f64) -> f64 {
        match &self.law {
            Law::PointMass { value } if *value == x => 1.0,
            Law::Mixture { weights, components } => weights.iter().zip(components).map(|(w, c)| w * c.atom(x)).sum(),
            _ => 0.0,
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match &self.law {
            Law::Exponential { rate } => rng.exponential(*rate),
            Law::Erlang { shape, rate } => (0..*shape).map(|_| rng.exponential(*rate)).sum(),
            Law::Hypoexponential { rates } => rates.iter().map(|&r| rng.exponential(r)).sum(),
            Law::Mixture { weights, components } => {
                let u = rng.uniform();
                let mut acc = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    acc += w;
                    if u < acc {
                        return c.sample(rng);
                    }
                }
                components.last().expect("nonempty mixture").sample(rng)
            }
            Law::PointMass { value } => *value,
        }
    }
}

/// Coefficients `c_i = prod_{j != i} r_j / (r_j - r_i)` of the distinct-rate
/// hypoexponential survival function `sum_i c_i exp(-r_i x)`.
fn hypo_coefficients(rates: &[f64]) -> impl Iterator<Item = f64> + '_ {
    rates
        .iter()
        .enumerate()
        .map(move |(i, ri)| rates.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, rj)| rj / (rj - ri)).product())
}

impl TryFrom<Law> for DistributionSpec {
    type Error = Error;

    fn try_from(law: Law) -> Result<Self> {
        match law {
            Law::Exponential { rate } => Self::exponential(rate),
            Law::Erlang { shape, rate } => Self::erlang(shape, rate),
            Law::Hypoexponential { rates } => Self::hypoexponential(&rates),
            Law::Mixture { weights, components } => {
                if weights.len() != components.len() {
                    return Err(Error::invalid("mixture weights and components differ in length"));
                }
                Self::mixture(weights.into_iter().zip(components).collect())
            }
            Law::PointMass { value } => Self::point_mass(value),
        }
    }
}

impl From<DistributionSpec> for Law {
    fn from(d: DistributionSpec) -> Self {
        d.law
    }
}
