use serde::{Deserialize, Serialize};

use super::record::PacketRecord;
use crate::{stats, Error, Result};

/// How inter-departure times are paired with initial ages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// `Y_n` with `A_{n-1}`, as the area decomposition requires.
    Lagged,
    /// `Y_n` with `A_n`. Wrong in general; kept to show that the lag matters.
    Aligned,
}

/// Sample versions of the quantities entering the aged-updates correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Terms {
    pub effective_rate: f64,
    pub cross_moment: f64,
    pub correlation: f64,
    pub cv_interdeparture: f64,
    pub mean_initial_age: f64,
    pub sd_initial_age: f64,
}

/// Estimates the correction ingredients from a log in departure order.
pub fn estimate_theorem1_terms(log: &[PacketRecord], pairing: Pairing) -> Result<Theorem1Terms> {
    if log.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 deliveries, got {}", log.len())));
    }
    let y: Vec<f64> = log.windows(2).map(|w| w[1].departure - w[0].departure).collect();
    let a: Vec<f64> = match pairing {
        Pairing::Lagged => log[..log.len() - 1].iter().map(|r| r.initial_age).collect(),
        Pairing::Aligned => log[1..].iter().map(|r| r.initial_age).collect(),
    };
    let elapsed = log[log.len() - 1].departure - log[0].departure;
    let cross = y.iter().zip(&a).map(|(y, a)| y * a).sum::<f64>() / y.len() as f64;
    let sd_a = if a.len() > 1 { stats::std_dev(&a) } else { 0.0 };
    Ok(Theorem1Terms {
        effective_rate: y.len() as f64 / elapsed,
        cross_moment: cross,
        correlation: if sd_a > 0.0 { stats::correlation(&y, &a) } else { f64::NAN },
        cv_interdeparture: stats::std_dev(&y) / stats::mean(&y),
        mean_initial_age: stats::mean(&a),
        sd_initial_age: sd_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(ages: &[f64]) -> Vec<PacketRecord> {
        ages.iter()
            .enumerate()
            .map(|(i, &a)| {
                let t = i as f64 * 2.0;
                PacketRecord {
                    id: i as u64,
                    generation: t - a,
                    arrival: t,
                    initial_age: a,
                    service_start: t,
                    departure: t + 1.0 + 0.1 * (i % 3) as f64,
                    node_arrivals: vec![],
                }
            })
            .collect()
    }

    #[test]
    fn constant_and_zero_feeds() {
        let t = estimate_theorem1_terms(&log(&[0.7; 10]), Pairing::Lagged).unwrap();
        assert!((t.mean_initial_age - 0.7).abs() < 1e-15);
        assert_eq!(t.sd_initial_age, 0.0);
        let z = estimate_theorem1_terms(&log(&[0.0; 10]), Pairing::Lagged).unwrap();
        assert_eq!(z.cross_moment, 0.0);
        assert!(estimate_theorem1_terms(&log(&[1.0]), Pairing::Lagged).is_err());
    }

    #[test]
    fn pairing_picks_the_right_ages() {
        let l = log(&[1.0, 2.0, 3.0]);
        let lag = estimate_theorem1_terms(&l, Pairing::Lagged).unwrap();
        let al = estimate_theorem1_terms(&l, Pairing::Aligned).unwrap();
        assert_eq!(lag.mean_initial_age, 1.5);
        assert_eq!(al.mean_initial_age, 2.5);
    }
}
