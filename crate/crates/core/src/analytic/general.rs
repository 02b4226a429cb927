use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Average age with aged updates from the zero-age average, the effective
/// arrival rate and `E[Y_n A_{n-1}]`.
pub fn theorem1_combine(delta0: f64, effective_rate: f64, cross_moment: f64) -> f64 {
    delta0 + effective_rate * cross_moment
}

/// Marginal statistics that determine the age correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionInputs {
    pub mean_initial_age: f64,
    pub sd_initial_age: f64,
    pub cv_interdeparture: f64,
    pub correlation: f64,
    pub effective_rate: f64,
}

impl CorrectionInputs {
    pub fn new(
        mean_initial_age: f64,
        sd_initial_age: f64,
        cv_interdeparture: f64,
        correlation: f64,
        effective_rate: f64,
    ) -> Result<Self> {
        if !(mean_initial_age >= 0.0 && sd_initial_age >= 0.0 && cv_interdeparture >= 0.0) {
            return Err(Error::invalid("initial-age moments and cv must be nonnegative"));
        }
        if !(-1.0..=1.0).contains(&correlation) {
            return Err(Error::invalid(format!("correlation {correlation} outside [-1, 1]")));
        }
        if !(effective_rate > 0.0 && effective_rate.is_finite()) {
            return Err(Error::invalid("effective rate must be positive"));
        }
        let inputs = Self { mean_initial_age, sd_initial_age, cv_interdeparture, correlation, effective_rate };
        if inputs.raw_correction() < 0.0 {
            return Err(Error::invalid(format!(
                "inputs imply a negative correction {}; E[Y A] cannot be negative",
                inputs.raw_correction()
            )));
        }
        Ok(inputs)
    }

    fn raw_correction(&self) -> f64 {
        self.mean_initial_age + self.correlation * self.cv_interdeparture * self.sd_initial_age
    }
}

/// `E[A] + r * kappa_Y * sigma_A`, the correction written through the
/// correlation between inter-departures and the previous initial age.
pub fn correction_term(inputs: &CorrectionInputs) -> f64 {
    inputs.raw_correction()
}

/// Smallest correlation compatible with a nonnegative correction.
pub fn correlation_floor(cv_initial_age: f64, cv_interdeparture: f64) -> f64 {
    -1.0 / (cv_initial_age * cv_interdeparture)
}

/// Closed interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInterval {
    pub lower: f64,
    pub upper: f64,
}

impl BoundInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// Lower end raised to zero, since the correction is never negative.
    pub fn clamped(&self) -> Self {
        Self { lower: self.lower.max(0.0), upper: self.upper.max(0.0) }
    }

    pub fn shifted(&self, by: f64) -> Self {
        Self { lower: self.lower + by, upper: self.upper + by }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Interval `E[A] +- kappa_Y sigma_A` that holds for any dependence between
/// inter-departures and initial ages.
pub fn correction_bounds(mean_initial_age: f64, sd_initial_age: f64, cv_interdeparture: f64) -> Result<BoundInterval> {
    if !(mean_initial_age >= 0.0 && sd_initial_age >= 0.0 && cv_interdeparture >= 0.0) {
        return Err(Error::invalid("bound inputs must be nonnegative"));
    }
    let half = cv_interdeparture * sd_initial_age;
    Ok(BoundInterval { lower: mean_initial_age - half, upper: mean_initial_age + half })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combine() {
        assert!((theorem1_combine(1.75, 1.0, 5.0 / 6.0) - 2.583_333_333_333_333).abs() < 1e-12);
        assert_eq!(theorem1_combine(1.75, 1.0, 0.0), 1.75);
    }

    #[test]
    fn correction_examples() {
        let independent = CorrectionInputs::new(2.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(correction_term(&independent), 2.0);
        let neg = CorrectionInputs::new(2.0, 1.0, 1.0, -0.5, 1.0).unwrap();
        assert_eq!(correction_term(&neg), 1.5);
        let deterministic = CorrectionInputs::new(2.0, 0.0, 1.3, -0.9, 1.0).unwrap();
        assert_eq!(correction_term(&deterministic), 2.0);
        assert!(CorrectionInputs::new(1.0, 2.0, 1.0, -0.9, 1.0).is_err());
        assert!(CorrectionInputs::new(1.0, 2.0, 1.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn bounds_examples() {
        let sd = (1.5f64).sqrt() / 0.5;
        let b = correction_bounds(2.0, sd, 1.0).unwrap();
        assert!((b.lower - (2.0 - sd)).abs() < 1e-15 && b.lower < 0.0);
        assert!((b.width() - 2.0 * sd).abs() < 1e-12);
        assert_eq!(b.clamped().lower, 0.0);
        let d = correction_bounds(2.0, 0.0, 1.0).unwrap();
        assert_eq!((d.lower, d.upper), (2.0, 2.0));
        let lt = correction_bounds(2.0, 3.0, 0.0).unwrap();
        assert_eq!(lt.width(), 0.0);
    }

    #[test]
    fn floor() {
        assert_eq!(correlation_floor(2.0, 0.5), -1.0);
    }
}
