use serde::{Deserialize, Serialize};

use crate::stochastic::{DistributionSpec, RngStream};
use crate::{Error, Result};

/// Service discipline of one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeModel {
    /// Single server, infinite FCFS buffer.
    FcfsInfinite { mu: f64 },
    /// Single server without buffer: arrivals during service are dropped.
    SingleCapacityBlocking { mu: f64 },
    /// Generate-at-will source retransmitting each packet until it gets
    /// through a channel that loses every attempt with probability `alpha`.
    ZeroWaitErrorChannel { mu: f64, alpha: f64 },
    /// Blocked arrivals join an orbit that retries at aggregate rate `theta`.
    RetrialOrbit { mu: f64, theta: f64 },
}

impl NodeModel {
    pub fn mu(&self) -> f64 {
        match *self {
            NodeModel::FcfsInfinite { mu }
            | NodeModel::SingleCapacityBlocking { mu }
            | NodeModel::ZeroWaitErrorChannel { mu, .. }
            | NodeModel::RetrialOrbit { mu, .. } => mu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rate_ok = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be a finite positive rate, got {v}")))
            }
        };
        rate_ok("mu", self.mu())?;
        match *self {
            NodeModel::ZeroWaitErrorChannel { alpha, .. } if !(0.0..1.0).contains(&alpha) => {
                Err(Error::Config(format!("alpha must lie in [0, 1), got {alpha}")))
            }
            NodeModel::RetrialOrbit { theta, .. } => rate_ok("theta", theta),
            _ => Ok(()),
        }
    }
}

/// Source of initial ages for packets entering a node from outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeFeed {
    Zero,
    /// I.i.d. ages independent of the queue.
    Independent(DistributionSpec),
    /// Replays recorded ages, wrapping around at the end.
    Trace(Vec<f64>),
}

impl AgeFeed {
    pub fn validate(&self) -> Result<()> {
        if let AgeFeed::Trace(v) = self {
            if v.is_empty() || v.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
                return Err(Error::Config("age trace must be non-empty, finite and nonnegative".into()));
            }
        }
        Ok(())
    }

    pub(crate) fn sampler(&self) -> FeedSampler<'_> {
        FeedSampler { feed: self, pos: 0 }
    }
}

pub(crate) struct FeedSampler<'a> {
    feed: &'a AgeFeed,
    pos: usize,
}

impl FeedSampler<'_> {
    pub fn next(&mut self, rng: &mut RngStream) -> f64 {
        match self.feed {
            AgeFeed::Zero => 0.0,
            AgeFeed::Independent(d) => d.sample(rng),
            AgeFeed::Trace(v) => {
                let a = v[self.pos % v.len()];
                self.pos += 1;
                a
            }
        }
    }
}

/// FCFS server driven by the Lindley recursion.
#[derive(Debug, Clone)]
pub(crate) struct Fcfs {
    mu: f64,
    last_departure: f64,
}

impl Fcfs {
    pub fn new(mu: f64) -> Self {
        Self { mu, last_departure: f64::NEG_INFINITY }
    }

    /// Returns `(service_start, departure)`.
    pub fn serve(&mut self, arrival: f64, rng: &mut RngStream) -> (f64, f64) {
        let start = arrival.max(self.last_departure);
        let dep = start + rng.exponential(self.mu);
        self.last_departure = dep;
        (start, dep)
    }
}

/// Bufferless server; a service time is drawn only for accepted packets.
#[derive(Debug, Clone)]
pub(crate) struct Blocking {
    mu: f64,
    busy_until: f64,
}

impl Blocking {
    pub fn new(mu: f64) -> Self {
        Self { mu, busy_until: f64::NEG_INFINITY }
    }

    pub fn offer(&mut self, arrival: f64, rng: &mut RngStream) -> Option<f64> {
        if arrival < self.busy_until {
            return None;
        }
        self.busy_until = arrival + rng.exponential(self.mu);
        Some(self.busy_until)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(NodeModel::FcfsInfinite { mu: 1.0 }.validate().is_ok());
        assert!(NodeModel::FcfsInfinite { mu: 0.0 }.validate().is_err());
        assert!(NodeModel::ZeroWaitErrorChannel { mu: 1.0, alpha: 1.0 }.validate().is_err());
        assert!(NodeModel::RetrialOrbit { mu: 1.0, theta: -1.0 }.validate().is_err());
        assert!(AgeFeed::Trace(vec![]).validate().is_err());
        assert!(AgeFeed::Trace(vec![0.5, -1.0]).validate().is_err());
    }

    #[test]
    fn fcfs_is_lindley() {
        let mut rng = RngStream::new(1, 0);
        let mut q = Fcfs::new(1.0);
        let (s0, d0) = q.serve(0.0, &mut rng);
        assert_eq!(s0, 0.0);
        let (s1, d1) = q.serve(d0 / 2.0, &mut rng);
        assert_eq!(s1, d0);
        assert!(d1 > d0);
        let (s2, _) = q.serve(d1 + 1.0, &mut rng);
        assert_eq!(s2, d1 + 1.0);
    }

    #[test]
    fn blocking_drops_during_service() {
        let mut rng = RngStream::new(2, 0);
        let mut b = Blocking::new(1.0);
        let d = b.offer(0.0, &mut rng).unwrap();
        assert!(b.offer(d / 2.0, &mut rng).is_none());
        assert!(b.offer(d, &mut rng).is_some());
    }

    #[test]
    fn trace_wraps() {
        let feed = AgeFeed::Trace(vec![1.0, 2.0]);
        let mut s = feed.sampler();
        let mut rng = RngStream::new(0, 0);
        let got: Vec<f64> = (0..5).map(|_| s.next(&mut rng)).collect();
        assert_eq!(got, vec![1.0, 2.0, 1.0, 2.0, 1.0]);
    }
}
