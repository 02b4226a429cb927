use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analytic::{self, BoundInterval};
use crate::sim::{self, AgeFeed, NodeModel, RunConfig, RunOutput, RunStatistics};
use crate::stats;
use crate::stochastic::{DistributionSpec, RngStream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// `lambda`, `mu`.
    #[serde(rename = "mm1")]
    MM1,
    /// `alpha`, `mu`.
    ZeroWait,
    /// `lambda`, `gamma` (first queue), `mu` (second queue).
    TandemTwo,
    /// `lambda` and the `rates` list.
    TandemChain,
    /// `lambda`, `gamma` (bufferless first node), `mu`.
    HeteroTandem,
    /// `lambda`, `theta`, `mu`.
    Retrial,
    /// FCFS queue (`lambda`, `mu`) fed with ages drawn from `feed`.
    IndependentFeed,
}

impl SystemKind {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name.replace('_', "-").as_str() {
            "mm1" => Self::MM1,
            "zero-wait" | "zw" => Self::ZeroWait,
            "tandem-two" | "tandem2" => Self::TandemTwo,
            "tandem-chain" | "tandem" => Self::TandemChain,
            "hetero-tandem" | "hetero" => Self::HeteroTandem,
            "retrial" => Self::Retrial,
            "independent-feed" | "feed" => Self::IndependentFeed,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::MM1 => "mm1",
            Self::ZeroWait => "zero-wait",
            Self::TandemTwo => "tandem-two",
            Self::TandemChain => "tandem-chain",
            Self::HeteroTandem => "hetero-tandem",
            Self::Retrial => "retrial",
            Self::IndependentFeed => "independent-feed",
        }
    }
}

/// A reproducible experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub system: SystemKind,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    /// Service rates of a tandem chain, in path order before `ordering`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rates: Vec<f64>,
    /// Initial-age law for an independent feed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feed: Option<DistributionSpec>,
    pub replications: u32,
    /// Observed departures per replication, after the warm-up.
    pub departures_per_rep: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<u64>,
    pub seed: u64,
    /// Permutation applied to `rates`: node `j` gets `rates[ordering[j]]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<usize>>,
}

impl ScenarioSpec {
    pub fn new(name: impl Into<String>, system: SystemKind, parameters: &[(&str, f64)]) -> Self {
        Self {
            name: name.into(),
            system,
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            rates: Vec::new(),
            feed: None,
            replications: 1,
            departures_per_rep: 100_000,
            warmup: None,
            seed: crate::DEFAULT_SEED,
            ordering: None,
        }
    }

    pub fn with_rates(mut self, rates: Vec<f64>) -> Self {
        self.rates = rates;
        self
    }

    pub fn with_feed(mut self, feed: DistributionSpec) -> Self {
        self.feed = Some(feed);
        self
    }

    pub fn with_runs(mut self, replications: u32, departures_per_rep: u64) -> Self {
        self.replications = replications;
        self.departures_per_rep = departures_per_rep;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate_shape()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn param(&self, key: &str) -> Result<f64> {
        self.parameters
            .get(key)
            .copied()
            .ok_or_else(|| Error::Config(format!("scenario '{}' needs parameter '{key}'", self.name)))
    }

    /// Service rates after applying the ordering.
    pub fn ordered_rates(&self) -> Result<Vec<f64>> {
        match &self.ordering {
            None => Ok(self.rates.clone()),
            Some(perm) => {
                let mut seen = vec![false; self.rates.len()];
                if perm.len() != self.rates.len()
                    || perm.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true))
                {
                    return Err(Error::Config(format!(
                        "ordering {perm:?} is not a permutation of {} nodes",
                        self.rates.len()
                    )));
                }
                Ok(perm.iter().map(|&i| self.rates[i]).collect())
            }
        }
    }

    fn validate_shape(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.departures_per_rep == 0 {
            return Err(Error::Config("departures_per_rep must be positive".into()));
        }
        let need: &[&str] = match self.system {
            SystemKind::MM1 | SystemKind::IndependentFeed => &["lambda", "mu"],
            SystemKind::ZeroWait => &["alpha", "mu"],
            SystemKind::TandemTwo | SystemKind::HeteroTandem => &["lambda", "gamma", "mu"],
            SystemKind::TandemChain => &["lambda"],
            SystemKind::Retrial => &["lambda", "theta", "mu"],
        };
        for k in need {
            self.param(k)?;
        }
        if self.system == SystemKind::TandemChain {
            if self.rates.is_empty() {
                return Err(Error::Config("tandem-chain needs a non-empty rates list".into()));
            }
            self.ordered_rates()?;
        }
        if self.system == SystemKind::IndependentFeed && self.feed.is_none() {
            return Err(Error::Config("independent-feed needs a feed distribution".into()));
        }
        Ok(())
    }

    /// Checks both the shape and the stability of the configuration.
    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        self.analytic().map(|_| ())
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig::observed(self.departures_per_rep, self.warmup)
    }

    /// One replication on the given stream.
    pub fn simulate(&self, cfg: &RunConfig, rng: RngStream) -> Result<RunOutput> {
        let p = |k| self.param(k);
        match self.system {
            SystemKind::MM1 => {
                sim::run_single_node(NodeModel::FcfsInfinite { mu: p("mu")? }, p("lambda")?, &AgeFeed::Zero, cfg, rng)
            }
            SystemKind::IndependentFeed => {
                let feed = AgeFeed::Independent(self.feed.clone().ok_or_else(|| Error::Config("missing feed".into()))?);
                sim::run_single_node(NodeModel::FcfsInfinite { mu: p("mu")? }, p("lambda")?, &feed, cfg, rng)
            }
            SystemKind::ZeroWait => sim::run_zero_wait(p("alpha")?, p("mu")?, cfg, rng),
            SystemKind::TandemTwo => sim::run_tandem(&[p("gamma")?, p("mu")?], p("lambda")?, cfg, rng),
            SystemKind::TandemChain => sim::run_tandem(&self.ordered_rates()?, p("lambda")?, cfg, rng),
            SystemKind::HeteroTandem => sim::run_hetero_tandem(p("lambda")?, p("gamma")?, p("mu")?, cfg, rng),
            SystemKind::Retrial => sim::run_retrial(p("lambda")?, p("theta")?, p("mu")?, cfg, rng),
        }
    }

    /// Closed-form reference for this configuration.
    pub fn analytic(&self) -> Result<AnalyticReport> {
        AnalyticReport::for_spec(self)
    }

    /// Runs every replication and compares the mean with the closed form.
    pub fn run(&self) -> Result<ExperimentResult> {
        self.validate()?;
        let cfg = self.run_config();
        let runs =
            sim::replicate(self.replications as usize, self.seed, |rng| self.simulate(&cfg, rng).map(|o| o.stats));
        let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
        ExperimentResult::new(self.clone(), runs)
    }
}

/// Closed-form quantities for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub model: String,
    /// Zero-age AAoI of the reference model.
    pub delta0: f64,
    /// Age correction `lambda^e E[Y_n A_{n-1}]`, when known in closed form.
    pub correction: Option<f64>,
    /// Full AAoI, when known in closed form.
    pub delta: Option<f64>,
    pub bounds: Option<BoundInterval>,
    /// Zero-age AAoI of the system's own departure process timed from
    /// service start. Only differs from `delta0` for the retrial queue,
    /// whose reference model does not share its departure process.
    pub delta0_service_start: Option<f64>,
    /// Weighted point estimate inside the bounds for tandem chains.
    pub heuristic: Option<f64>,
}

impl AnalyticReport {
    fn base(model: &str, delta0: f64) -> Self {
        Self {
            model: model.to_string(),
            delta0,
            correction: None,
            delta: None,
            bounds: None,
            delta0_service_start: None,
            heuristic: None,
        }
    }

    pub fn for_spec(spec: &ScenarioSpec) -> Result<Self> {
        let p = |k| spec.param(k);
        let name = spec.system.name();
        Ok(match spec.system {
            SystemKind::MM1 => {
                let d0 = analytic::aaoi_mm1_fcfs(p("lambda")?, p("mu")?)?;
                Self { correction: Some(0.0), delta: Some(d0), ..Self::base(name, d0) }
            }
            SystemKind::IndependentFeed => {
                let d0 = analytic::aaoi_mm1_fcfs(p("lambda")?, p("mu")?)?;
                let feed = spec.feed.as_ref().ok_or_else(|| Error::Config("missing feed".into()))?;
                let ea = feed.mean();
                Self {
                    correction: Some(ea),
                    delta: Some(d0 + ea),
                    bounds: Some(analytic::correction_bounds(ea, feed.std_dev(), 1.0)?.shifted(d0)),
                    ..Self::base(name, d0)
                }
            }
            SystemKind::ZeroWait => {
                let (alpha, mu) = (p("alpha")?, p("mu")?);
                let d0 = analytic::zw_error_free_aaoi(mu)?;
                let mix = analytic::zw_initial_age_mixture(alpha, mu)?;
                Self {
                    correction: Some(mix.mean()),
                    delta: Some(analytic::zw_aaoi(alpha, mu)?),
                    bounds: Some(analytic::correction_bounds(mix.mean(), mix.std_dev(), 1.0)?.shifted(d0)),
                    ..Self::base(name, d0)
                }
            }
            SystemKind::TandemTwo => {
                let (l, g, mu) = (p("lambda")?, p("gamma")?, p("mu")?);
                let d0 = analytic::aaoi_mm1_fcfs(l, mu)?;
                let chain = analytic::tandem_chain_bounds(l, &[g], mu)?;
                Self {
                    correction: Some(l * analytic::tandem_cross_moment(l, g, mu)?),
                    delta: Some(analytic::aaoi_tandem_two(l, g, mu)?),
                    bounds: Some(chain.interval),
                    ..Self::base(name, d0)
                }
            }
            SystemKind::TandemChain => {
                let l = p("lambda")?;
                let rates = spec.ordered_rates()?;
                let (last, prior) = rates.split_last().expect("validated non-empty");
                let chain = analytic::tandem_chain_bounds(l, prior, *last)?;
                let (correction, delta) = match prior {
                    [] => (Some(0.0), Some(chain.delta0)),
                    [g] => (
                        Some(l * analytic::tandem_cross_moment(l, *g, *last)?),
                        Some(analytic::aaoi_tandem_two(l, *g, *last)?),
                    ),
                    _ => (None, None),
                };
                Self {
                    correction,
                    delta,
                    bounds: Some(chain.interval),
                    heuristic: Some(analytic::tandem_heuristic_estimate(&chain.interval)),
                    ..Self::base(name, chain.delta0)
                }
            }
            SystemKind::HeteroTandem => {
                let (l, g, mu) = (p("lambda")?, p("gamma")?, p("mu")?);
                let d0 = analytic::hem1_aaoi(l, g, mu)?;
                // The interval needs the inter-departure spread, available in
                // closed form only for distinct rates.
                let bounds = analytic::hem1_moments(l, g, mu).ok().map(|m| {
                    let cv = (m.second_moment_y - m.mean_y * m.mean_y).sqrt() / m.mean_y;
                    BoundInterval { lower: 1.0 / g - cv / g, upper: 1.0 / g + cv / g }.shifted(d0)
                });
                Self {
                    correction: Some(1.0 / g),
                    delta: Some(analytic::tandem_hetero_aaoi(l, g, mu)?),
                    bounds,
                    ..Self::base(name, d0)
                }
            }
            SystemKind::Retrial => {
                let (l, th, mu) = (p("lambda")?, p("theta")?, p("mu")?);
                let d0 = analytic::aaoi_mm11_nonpreemptive(l + th, mu)?;
                let orbit = analytic::retrial_orbit_metrics(l, th, mu)?;
                Self {
                    correction: Some(orbit.mean_initial_age),
                    delta: Some(analytic::retrial_aaoi(l, th, mu)?),
                    delta0_service_start: Some(analytic::retrial_equivalent_zero_age_aaoi(l, th, mu)?),
                    ..Self::base(name, d0)
                }
            }
        })
    }
}

/// Aggregated replications of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec: ScenarioSpec,
    pub runs: Vec<RunStatistics>,
    pub mean_aaoi: f64,
    /// Standard deviation of the replication means.
    pub sd_aaoi: f64,
    /// Standard error of `mean_aaoi`: across replications when there are at
    /// least two, otherwise the batch-means error of the single run.
    pub se_aaoi: f64,
    pub analytic: AnalyticReport,
    /// `Some(true)` when the mean lies within 1% of the closed form, or
    /// inside the bounds when only those are known.
    pub verdict: Option<bool>,
}

impl ExperimentResult {
    pub fn new(spec: ScenarioSpec, runs: Vec<RunStatistics>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::InsufficientData("no replications".into()));
        }
        let analytic = spec.analytic()?;
        let values: Vec<f64> = runs.iter().map(RunStatistics::aaoi).collect();
        let mean_aaoi = stats::mean(&values);
        let (sd_aaoi, se_aaoi) = if values.len() > 1 {
            (stats::std_dev(&values), stats::std_error(&values))
        } else {
            (f64::NAN, runs[0].standard_errors.aaoi)
        };
        let verdict = match (analytic.delta, analytic.bounds) {
            (Some(d), _) => Some((mean_aaoi - d).abs() <= 0.01 * d),
            (None, Some(b)) => Some(b.contains(mean_aaoi)),
            _ => None,
        };
        Ok(Self { spec, runs, mean_aaoi, sd_aaoi, se_aaoi, analytic, verdict })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut s = ScenarioSpec::new("chain", SystemKind::TandemChain, &[("lambda", 1.0)])
            .with_rates(vec![10.0, 2.0, 1.0 / 0.9])
            .with_runs(100, 100_000);
        s.ordering = Some(vec![2, 0, 1]);
        let text = s.to_toml().unwrap();
        assert_eq!(ScenarioSpec::from_toml(&text).unwrap(), s);

        let f = ScenarioSpec::new("feed", SystemKind::IndependentFeed, &[("lambda", 1.0), ("mu", 2.0)])
            .with_feed(DistributionSpec::erlang(2, 3.0).unwrap());
        assert_eq!(ScenarioSpec::from_toml(&f.to_toml().unwrap()).unwrap(), f);
    }

    #[test]
    fn shape_errors() {
        let mut s = ScenarioSpec::new("x", SystemKind::Retrial, &[("lambda", 1.0), ("mu", 4.0)]);
        assert!(matches!(s.validate(), Err(Error::Config(_))));
        s.parameters.insert("theta".into(), 1.0);
        assert!(s.validate().is_ok());
        s.parameters.insert("mu".into(), 1.5);
        assert!(matches!(s.validate(), Err(Error::Unstable { .. })));
        let mut c = ScenarioSpec::new("c", SystemKind::TandemChain, &[("lambda", 1.0)]).with_rates(vec![2.0, 3.0]);
        c.ordering = Some(vec![0, 0]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn ordering_is_applied() {
        let mut c = ScenarioSpec::new("c", SystemKind::TandemChain, &[("lambda", 1.0)]).with_rates(vec![2.0, 3.0, 4.0]);
        c.ordering = Some(vec![2, 0, 1]);
        assert_eq!(c.ordered_rates().unwrap(), vec![4.0, 2.0, 3.0]);
    }

    #[test]
    fn reports() {
        let r = ScenarioSpec::new("r", SystemKind::Retrial, &[("lambda", 1.0), ("theta", 1.0), ("mu", 4.0)])
            .analytic()
            .unwrap();
        assert!((r.delta.unwrap() - 1.208_333_333_333_333).abs() < 1e-12);
        assert!((r.delta0 + r.correction.unwrap() - r.delta.unwrap()).abs() < 1e-12);
        let t = ScenarioSpec::new("t", SystemKind::TandemTwo, &[("lambda", 1.0), ("gamma", 2.0), ("mu", 2.0)])
            .analytic()
            .unwrap();
        assert!((t.delta0 + t.correction.unwrap() - t.delta.unwrap()).abs() < 1e-12);
        let b = t.bounds.unwrap();
        assert!(b.lower <= t.delta.unwrap() && t.delta.unwrap() <= b.upper);
        let chain = ScenarioSpec::new("c", SystemKind::TandemChain, &[("lambda", 1.0)])
            .with_rates(vec![10.0, 2.0, 1.0 / 0.9])
            .analytic()
            .unwrap();
        assert!(chain.delta.is_none());
        assert!((chain.bounds.unwrap().lower - 9.29).abs() < 0.05);
    }

    #[test]
    fn run_small_experiment() {
        let s = ScenarioSpec::new("mm1", SystemKind::MM1, &[("lambda", 1.0), ("mu", 2.0)]).with_runs(4, 20_000);
        let r = s.run().unwrap();
        assert_eq!(r.runs.len(), 4);
        assert!((r.mean_aaoi - 1.75).abs() < 0.05);
        assert_eq!(r.runs[0].samples, 20_000);
    }
}
