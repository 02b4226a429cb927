use serde::{Deserialize, Serialize};

use super::spec::{ScenarioSpec, SystemKind};
use crate::sim::{self, estimate_theorem1_terms, Pairing};
use crate::stochastic::DistributionSpec;
use crate::{stats, Error, Result};

/// Result of comparing `Delta_hat - lambda_hat E_hat[Y A]` with a zero-age
/// reference across replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureVerdict {
    pub name: String,
    pub mean_aaoi: f64,
    /// Mean over replications of `Delta_hat - lambda_hat E_hat[Y A]`.
    pub implied_delta0: f64,
    /// Standard error of `implied_delta0` across replications.
    pub combined_se: f64,
    pub delta0: f64,
    pub z: f64,
    pub passed: bool,
    /// Same comparison against the service-start reference, when the model
    /// has one that differs.
    pub service_start: Option<(f64, f64, bool)>,
}

/// Threshold in combined standard errors.
pub const CLOSURE_SIGMAS: f64 = 3.0;

pub fn closure_check(spec: &ScenarioSpec, pairing: Pairing) -> Result<ClosureVerdict> {
    spec.validate()?;
    if spec.replications < 2 {
        return Err(Error::Config("a closure check needs at least 2 replications".into()));
    }
    let report = spec.analytic()?;
    let cfg = spec.run_config();
    let cfg = if pairing == Pairing::Lagged { cfg } else { cfg.with_log() };
    let skip = (cfg.effective_warmup().max(1) - 1) as usize;
    let per_rep = sim::replicate(spec.replications as usize, spec.seed, |rng| -> Result<(f64, f64)> {
        let out = spec.simulate(&cfg, rng)?;
        let e = out.stats.estimates;
        let implied = match pairing {
            Pairing::Lagged => e.aaoi - e.effective_rate * e.cross_moment,
            _ => {
                let log = out.log.as_deref().unwrap_or_default();
                let t = estimate_theorem1_terms(&log[skip.min(log.len())..], pairing)?;
                e.aaoi - t.effective_rate * t.cross_moment
            }
        };
        Ok((e.aaoi, implied))
    });
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;
    let aaoi: Vec<f64> = per_rep.iter().map(|p| p.0).collect();
    let implied: Vec<f64> = per_rep.iter().map(|p| p.1).collect();
    let m = stats::mean(&implied);
    let se = stats::std_error(&implied);
    let judge = |reference: f64| {
        let z = (m - reference).abs() / se;
        (z, z < CLOSURE_SIGMAS)
    };
    let (z, passed) = judge(report.delta0);
    Ok(ClosureVerdict {
        name: spec.name.clone(),
        mean_aaoi: stats::mean(&aaoi),
        implied_delta0: m,
        combined_se: se,
        delta0: report.delta0,
        z,
        passed,
        service_start: report.delta0_service_start.map(|d| {
            let (z, ok) = judge(d);
            (d, z, ok)
        }),
    })
}

pub fn theorem1_closure_suite(specs: &[ScenarioSpec]) -> Result<Vec<ClosureVerdict>> {
    specs.iter().map(|s| closure_check(s, Pairing::Lagged)).collect()
}

/// The five worked configurations: a fixed delay of 0.5 in front of an
/// M/M/1 queue, zero-wait with `alpha = 0.5`, the two-queue tandem at
/// (1, 2, 2), the heterogeneous tandem at (1, 1, 2) and the retrial queue at
/// (1, 1, 4).
pub fn default_closure_scenarios(replications: u32, departures_per_rep: u64, seed: u64) -> Vec<ScenarioSpec> {
    let fixed = DistributionSpec::point_mass(0.5).expect("valid point mass");
    vec![
        ScenarioSpec::new("fixed-delay", SystemKind::IndependentFeed, &[("lambda", 1.0), ("mu", 2.0)]).with_feed(fixed),
        ScenarioSpec::new("zero-wait", SystemKind::ZeroWait, &[("alpha", 0.5), ("mu", 1.0)]),
        ScenarioSpec::new("tandem-two", SystemKind::TandemTwo, &[("lambda", 1.0), ("gamma", 2.0), ("mu", 2.0)]),
        ScenarioSpec::new("hetero-tandem", SystemKind::HeteroTandem, &[("lambda", 1.0), ("gamma", 1.0), ("mu", 2.0)]),
        ScenarioSpec::new("retrial", SystemKind::Retrial, &[("lambda", 1.0), ("theta", 1.0), ("mu", 4.0)]),
    ]
    .into_iter()
    .map(|s| s.with_runs(replications, departures_per_rep).with_seed(seed))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mm1_closure_reduces_to_zero_age() {
        let s = ScenarioSpec::new("mm1", SystemKind::MM1, &[("lambda", 1.0), ("mu", 2.0)]).with_runs(8, 20_000);
        let v = closure_check(&s, Pairing::Lagged).unwrap();
        assert_eq!(v.implied_delta0, v.mean_aaoi);
        assert!(v.passed, "{v:?}");
        assert!(v.service_start.is_none());
    }

    #[test]
    fn needs_replications() {
        let s = ScenarioSpec::new("mm1", SystemKind::MM1, &[("lambda", 1.0), ("mu", 2.0)]).with_runs(1, 1_000);
        assert!(closure_check(&s, Pairing::Lagged).is_err());
    }
}
