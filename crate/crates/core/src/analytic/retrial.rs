//! M/M/1 retrial queue: arrivals that find the server busy join an orbit and
//! the orbit retries as a single stream of rate `theta`.

use serde::{Deserialize, Serialize};

use super::{positive, strictly_below};
use crate::Result;

/// Zero-age AAoI of the M/M/1/1 queue without preemption in service.
pub fn aaoi_mm11_nonpreemptive(total_rate: f64, mu: f64) -> Result<f64> {
    positive("total rate", total_rate)?;
    positive("mu", mu)?;
    Ok(1.0 / total_rate + 1.0 / mu + total_rate / (mu * (total_rate + mu)))
}

fn check(lambda: f64, theta: f64, mu: f64) -> Result<(f64, f64)> {
    positive("lambda", lambda)?;
    positive("theta", theta)?;
    positive("mu", mu)?;
    let rho = lambda / mu;
    let pi = theta / (lambda + theta);
    strictly_below(rho, pi, "rho < pi, i.e. lambda / mu < theta / (lambda + theta)")?;
    Ok((rho, pi))
}

/// Joint law of (server state, orbit size).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrialSteadyState {
    pub rho: f64,
    pub pi: f64,
}

impl RetrialSteadyState {
    /// `P(server = busy, orbit = n)` for `busy` in {0, 1}.
    pub fn p(&self, busy: u8, n: u32) -> f64 {
        let q0 = 1.0 - self.rho / self.pi;
        let ratio = (self.rho / self.pi).powi(n as i32);
        match (busy, n) {
            (0, 0) => q0,
            (0, _) => q0 * (1.0 - self.pi) * ratio,
            (1, _) => q0 * self.rho * ratio,
            _ => 0.0,
        }
    }

    pub fn p_busy(&self) -> f64 {
        self.rho
    }

    pub fn mean_orbit(&self) -> f64 {
        self.rho * (1.0 + self.rho - self.pi) / (self.pi - self.rho)
    }
}

pub fn retrial_steady_state(lambda: f64, theta: f64, mu: f64) -> Result<RetrialSteadyState> {
    let (rho, pi) = check(lambda, theta, mu)?;
    Ok(RetrialSteadyState { rho, pi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitMetrics {
    pub l_orbit: f64,
    pub w_orbit: f64,
    /// `pi * w_orbit`.
    pub mean_initial_age: f64,
}

pub fn retrial_orbit_metrics(lambda: f64, theta: f64, mu: f64) -> Result<OrbitMetrics> {
    let (rho, pi) = check(lambda, theta, mu)?;
    let l_orbit = rho * (1.0 + rho - pi) / (pi - rho);
    let w_orbit = (1.0 + rho - pi) / (mu * (pi - rho));
    Ok(OrbitMetrics { l_orbit, w_orbit, mean_initial_age: pi * w_orbit })
}

/// `Delta^0` of the M/M/1/1 queue with rate `lambda + theta` plus the mean
/// initial age `pi * W_o`.
pub fn retrial_aaoi(lambda: f64, theta: f64, mu: f64) -> Result<f64> {
    let (rho, pi) = check(lambda, theta, mu)?;
    let k = 1.0 + rho - pi;
    Ok((k / rho + rho / k + pi * k / (pi - rho)) / mu)
}

/// Zero-age AAoI of the retrial queue's own departure process, with each
/// update time-stamped when its successful service starts.
///
/// After a departure the orbit is empty with probability `1 - rho / pi`; the
/// next service then waits for a fresh arrival, otherwise for the first of a
/// fresh arrival and a retrial.
pub fn retrial_equivalent_zero_age_aaoi(lambda: f64, theta: f64, mu: f64) -> Result<f64> {
    let (rho, pi) = check(lambda, theta, mu)?;
    let q0 = 1.0 - rho / pi;
    let total = lambda + theta;
    let idle = q0 / lambda + (1.0 - q0) / total;
    let idle2 = 2.0 * q0 / (lambda * lambda) + 2.0 * (1.0 - q0) / (total * total);
    let y2 = 2.0 / (mu * mu) + 2.0 * idle / mu + idle2;
    // Service S_n against the following idle period: a long service lets
    // fresh arrivals reach the orbit.
    let s_idle = (1.0 / mu) / total + (1.0 / lambda - 1.0 / total) * q0 / (lambda + mu);
    let y_s = 1.0 / (mu * mu) + s_idle;
    Ok(lambda * (y2 / 2.0 + y_s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn mm11_values() {
        assert!((aaoi_mm11_nonpreemptive(2.0, 4.0).unwrap() - 0.833_333_333_333_333_4).abs() < 1e-12);
        assert!((aaoi_mm11_nonpreemptive(2.0, 1e12).unwrap() - 0.5).abs() < 1e-9);
        assert!((aaoi_mm11_nonpreemptive(1e12, 4.0).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn steady_state() {
        let s = retrial_steady_state(1.0, 1.0, 4.0).unwrap();
        assert_eq!((s.rho, s.pi), (0.25, 0.5));
        assert_eq!(s.p(0, 0), 0.5);
        let total: f64 = (0..400).map(|n| s.p(0, n) + s.p(1, n)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let busy: f64 = (0..400).map(|n| s.p(1, n)).sum();
        assert!((busy - 0.25).abs() < 1e-12);
        let mean: f64 = (0..400).map(|n| n as f64 * (s.p(0, n) + s.p(1, n))).sum();
        assert!((mean - s.mean_orbit()).abs() < 1e-12);
        assert!(matches!(retrial_steady_state(1.0, 1.0, 2.0), Err(Error::Unstable { .. })));
    }

    #[test]
    fn fast_retrials_approach_mm1() {
        let s = retrial_steady_state(1.0, 1e9, 2.0).unwrap();
        for n in 0..10 {
            let mm1 = 0.5 * 0.5f64.powi(n as i32);
            let total = if n == 0 { s.p(0, 0) } else { s.p(0, n) + s.p(1, n - 1) };
            assert!((total - mm1).abs() < 1e-6, "n = {n}");
        }
        let o = retrial_orbit_metrics(1.0, 1e9, 2.0).unwrap();
        assert!((o.l_orbit - 0.25 / 0.5).abs() < 1e-6);
    }

    #[test]
    fn orbit_metrics() {
        let o = retrial_orbit_metrics(1.0, 1.0, 4.0).unwrap();
        assert!((o.l_orbit - 0.75).abs() < 1e-15);
        assert!((o.w_orbit - 0.75).abs() < 1e-15);
        assert!((o.mean_initial_age - 0.375).abs() < 1e-15);
    }

    #[test]
    fn aaoi_values() {
        let v = retrial_aaoi(1.0, 1.0, 4.0).unwrap();
        assert!((v - 1.208_333_333_333_333).abs() < 1e-12);
        let decomposed =
            aaoi_mm11_nonpreemptive(2.0, 4.0).unwrap() + retrial_orbit_metrics(1.0, 1.0, 4.0).unwrap().mean_initial_age;
        assert!((v - decomposed).abs() < 1e-12);
        let rho: f64 = 0.3;
        let limit = 2.0 + rho / (1.0 - rho);
        assert!((retrial_aaoi(0.3, 1e10, 1.0).unwrap() - limit).abs() < 1e-6);
    }

    #[test]
    fn equivalent_zero_age() {
        assert!((retrial_equivalent_zero_age_aaoi(1.0, 1.0, 4.0).unwrap() - 1.1125).abs() < 1e-12);
        // With instant retrials only fresh arrivals end an idle period.
        let (l, mu) = (1.0, 3.0);
        let q0 = 1.0 - l / mu;
        let ey2 = 2.0 / (mu * mu) + 2.0 * q0 / (l * mu) + 2.0 * q0 / (l * l);
        let eys = 1.0 / (mu * mu) + q0 / (l * (l + mu));
        let v = retrial_equivalent_zero_age_aaoi(l, 1e12, mu).unwrap();
        assert!((v - l * (ey2 / 2.0 + eys)).abs() < 1e-9);
    }
}
