use serde::{Deserialize, Serialize};

use super::events::{EventKind, EventQueue};
use super::nodes::{AgeFeed, Blocking, Fcfs, NodeModel};
use super::observer::{Delivery, Observer, RunSamples, RunStatistics};
use super::record::PacketRecord;
use crate::analytic::{positive, strictly_below};
use crate::stochastic::RngStream;
use crate::{Error, Result};

/// Largest orbit size tracked individually by the retrial occupancy histogram.
pub const OCCUPANCY_LEVELS: usize = 50;

/// Run length and output options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Departures from the monitored node, warm-up included.
    pub departures: u64,
    /// Departures discarded before observation; `None` uses [`default_warmup`].
    pub warmup: Option<u64>,
    pub record_log: bool,
    pub keep_samples: bool,
    /// Lets FCFS and retrial runs proceed outside their stability region.
    pub allow_unstable: bool,
}

impl RunConfig {
    pub fn new(departures: u64) -> Self {
        Self { departures, warmup: None, record_log: false, keep_samples: false, allow_unstable: false }
    }

    /// Exactly `observed` post-warmup intervals, after `warmup` (or the
    /// default warm-up for that length).
    pub fn observed(observed: u64, warmup: Option<u64>) -> Self {
        let w = warmup.unwrap_or_else(|| default_warmup(observed));
        Self { departures: observed + w.max(1), warmup: Some(w), ..Self::new(0) }
    }

    pub fn with_warmup(mut self, warmup: u64) -> Self {
        self.warmup = Some(warmup);
        self
    }

    pub fn with_log(mut self) -> Self {
        self.record_log = true;
        self
    }

    pub fn with_samples(mut self) -> Self {
        self.keep_samples = true;
        self
    }

    pub fn allowing_unstable(mut self) -> Self {
        self.allow_unstable = true;
        self
    }

    pub fn effective_warmup(&self) -> u64 {
        self.warmup.unwrap_or_else(|| default_warmup(self.departures))
    }

    fn validate(&self) -> Result<()> {
        let w = self.effective_warmup();
        if self.departures < 2 || w >= self.departures {
            return Err(Error::Config(format!(
                "need warmup < departures and at least 2 departures, got warmup {w}, departures {}",
                self.departures
            )));
        }
        Ok(())
    }
}

/// `max(10^4, 5%)` of the departures, but never more than half of them.
pub fn default_warmup(departures: u64) -> u64 {
    (departures / 20).max(10_000).min(departures / 2)
}

/// Time-averaged state occupancy and orbit statistics of a retrial run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrialExtras {
    /// `occupancy[n] = [P(idle, n), P(busy, n)]` for `n <= OCCUPANCY_LEVELS`.
    pub occupancy: Vec<[f64; 2]>,
    /// Fraction of time with a larger orbit.
    pub overflow: f64,
    pub observed_time: f64,
    pub p_busy: f64,
    /// Mean time from arrival to service start over observed deliveries.
    pub mean_orbit_wait: f64,
    /// Fraction of observed deliveries that went through the orbit.
    pub orbit_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub stats: RunStatistics,
    pub samples: Option<RunSamples>,
    pub log: Option<Vec<PacketRecord>>,
    /// Statistics at the output of every node of a tandem, in path order.
    pub per_node: Vec<RunStatistics>,
    pub retrial: Option<RetrialExtras>,
}

struct Sink {
    obs: Observer,
    log: Option<Vec<PacketRecord>>,
    total: u64,
}

impl Sink {
    fn new(cfg: &RunConfig) -> Self {
        Self {
            obs: Observer::new(cfg.departures, cfg.effective_warmup(), cfg.keep_samples),
            log: cfg.record_log.then(Vec::new),
            total: cfg.departures,
        }
    }

    fn push(&mut self, d: Delivery, node_arrivals: impl FnOnce() -> Vec<f64>) {
        if let Some(log) = self.log.as_mut() {
            log.push(PacketRecord {
                id: self.obs.seen(),
                generation: d.generation,
                arrival: d.arrival,
                initial_age: d.initial_age(),
                service_start: d.service_start,
                departure: d.departure,
                node_arrivals: node_arrivals(),
            });
        }
        self.obs.observe(d);
    }

    fn done(&self) -> bool {
        self.obs.seen() >= self.total
    }

    fn finish(self, blocked: u64, per_node: Vec<RunStatistics>, retrial: Option<RetrialExtras>) -> Result<RunOutput> {
        let (stats, samples) =
            self.obs.finish(blocked).ok_or_else(|| Error::InsufficientData("no interval was observed".into()))?;
        Ok(RunOutput { stats, samples, log: self.log, per_node, retrial })
    }
}

/// Simulates one node fed by a Poisson stream of rate `arrival_rate` whose
/// packets carry initial ages drawn from `feed`.
///
/// For the zero-wait node the arrival rate is ignored (the source generates
/// a packet whenever the previous one gets through) and the feed adds age to
/// each fresh packet.
pub fn run_single_node(
    node: NodeModel,
    arrival_rate: f64,
    feed: &AgeFeed,
    cfg: &RunConfig,
    mut rng: RngStream,
) -> Result<RunOutput> {
    node.validate()?;
    feed.validate()?;
    cfg.validate()?;
    match node {
        NodeModel::FcfsInfinite { mu } => {
            positive("arrival rate", arrival_rate)?;
            if !cfg.allow_unstable {
                strictly_below(arrival_rate, mu, "arrival rate < mu")?;
            }
            let mut sink = Sink::new(cfg);
            let mut q = Fcfs::new(mu);
            let mut ages = feed.sampler();
            let mut t = 0.0;
            while !sink.done() {
                t += rng.exponential(arrival_rate);
                let a = ages.next(&mut rng);
                let (start, dep) = q.serve(t, &mut rng);
                sink.push(Delivery { generation: t - a, arrival: t, service_start: start, departure: dep }, Vec::new);
            }
            sink.finish(0, Vec::new(), None)
        }
        NodeModel::SingleCapacityBlocking { mu } => {
            positive("arrival rate", arrival_rate)?;
            let mut sink = Sink::new(cfg);
            let mut q = Blocking::new(mu);
            let mut ages = feed.sampler();
            let mut t = 0.0;
            let mut blocked = 0;
            while !sink.done() {
                t += rng.exponential(arrival_rate);
                let a = ages.next(&mut rng);
                match q.offer(t, &mut rng) {
                    Some(dep) => sink
                        .push(Delivery { generation: t - a, arrival: t, service_start: t, departure: dep }, Vec::new),
                    None => blocked += 1,
                }
            }
            sink.finish(blocked, Vec::new(), None)
        }
        NodeModel::ZeroWaitErrorChannel { mu, alpha } => zero_wait(alpha, mu, feed, cfg, rng),
        NodeModel::RetrialOrbit { mu, theta } => retrial(arrival_rate, theta, mu, feed, cfg, rng),
    }
}

/// Poisson arrivals through a chain of FCFS queues; the initial age at each
/// node is the time already spent in the chain.
pub fn run_tandem(rates: &[f64], arrival_rate: f64, cfg: &RunConfig, mut rng: RngStream) -> Result<RunOutput> {
    cfg.validate()?;
    positive("arrival rate", arrival_rate)?;
    if rates.is_empty() {
        return Err(Error::Config("a tandem needs at least one node".into()));
    }
    for (i, &mu) in rates.iter().enumerate() {
        positive("service rate", mu)?;
        if !cfg.allow_unstable {
            strictly_below(arrival_rate, mu, &format!("arrival rate < mu_{}", i + 1))?;
        }
    }
    let k = rates.len();
    let mut queues: Vec<Fcfs> = rates.iter().map(|&mu| Fcfs::new(mu)).collect();
    let inner = RunConfig { record_log: false, keep_samples: false, ..*cfg };
    let mut upstream: Vec<Observer> =
        (0..k - 1).map(|_| Observer::new(inner.departures, inner.effective_warmup(), false)).collect();
    let mut sink = Sink::new(cfg);
    let mut arrivals = vec![0.0; k];
    let mut t = 0.0;
    while !sink.done() {
        t += rng.exponential(arrival_rate);
        let mut at = t;
        for (j, q) in queues.iter_mut().enumerate() {
            arrivals[j] = at;
            let (start, dep) = q.serve(at, &mut rng);
            let d = Delivery { generation: t, arrival: at, service_start: start, departure: dep };
            if j + 1 < k {
                upstream[j].observe(d);
            } else {
                sink.push(d, || arrivals.clone());
            }
            at = dep;
        }
    }
    let mut per_node = Vec::with_capacity(k);
    for obs in upstream {
        per_node.push(obs.finish(0).map(|s| s.0).ok_or_else(|| Error::InsufficientData("no interval".into()))?);
    }
    let mut out = sink.finish(0, Vec::new(), None)?;
    per_node.push(out.stats.clone());
    out.per_node = per_node;
    Ok(out)
}

/// Bufferless node of rate `gamma` feeding an FCFS node of rate `mu`.
pub fn run_hetero_tandem(lambda: f64, gamma: f64, mu: f64, cfg: &RunConfig, mut rng: RngStream) -> Result<RunOutput> {
    cfg.validate()?;
    positive("lambda", lambda)?;
    positive("gamma", gamma)?;
    positive("mu", mu)?;
    if !cfg.allow_unstable {
        crate::analytic::hem1_rho(lambda, gamma, mu)?;
    }
    let mut first = Blocking::new(gamma);
    let mut second = Fcfs::new(mu);
    let mut upstream = Observer::new(cfg.departures, cfg.effective_warmup(), false);
    let mut sink = Sink::new(cfg);
    let mut blocked = 0;
    let mut t = 0.0;
    while !sink.done() {
        t += rng.exponential(lambda);
        let Some(mid) = first.offer(t, &mut rng) else {
            blocked += 1;
            continue;
        };
        upstream.observe(Delivery { generation: t, arrival: t, service_start: t, departure: mid });
        let (start, dep) = second.serve(mid, &mut rng);
        sink.push(Delivery { generation: t, arrival: mid, service_start: start, departure: dep }, || vec![t, mid]);
    }
    let first_stats =
        upstream.finish(blocked).map(|s| s.0).ok_or_else(|| Error::InsufficientData("no interval".into()))?;
    let mut out = sink.finish(blocked, Vec::new(), None)?;
    out.per_node = vec![first_stats, out.stats.clone()];
    Ok(out)
}

/// Zero-wait source over a lossy channel, observed as the equivalent
/// aged-updates model in which every attempt is a departure.
///
/// A successful attempt delivers its own packet. A failed one "delivers" the
/// last successful generation again, which leaves the age path untouched.
pub fn run_zero_wait(alpha: f64, mu: f64, cfg: &RunConfig, rng: RngStream) -> Result<RunOutput> {
    NodeModel::ZeroWaitErrorChannel { mu, alpha }.validate()?;
    cfg.validate()?;
    zero_wait(alpha, mu, &AgeFeed::Zero, cfg, rng)
}

fn zero_wait(alpha: f64, mu: f64, feed: &AgeFeed, cfg: &RunConfig, mut rng: RngStream) -> Result<RunOutput> {
    let mut ages = feed.sampler();
    let mut sink = Sink::new(cfg);
    let mut t = 0.0;
    let mut last_success = 0.0;
    let mut packet = -ages.next(&mut rng);
    let mut lost = 0;
    while !sink.done() {
        let dep = t + rng.exponential(mu);
        let failed = rng.bernoulli(alpha);
        let generation = if failed {
            lost += 1;
            last_success
        } else {
            last_success = packet;
            packet
        };
        sink.push(Delivery { generation, arrival: t, service_start: t, departure: dep }, Vec::new);
        t = dep;
        if !failed {
            packet = t - ages.next(&mut rng);
        }
    }
    sink.finish(lost, Vec::new(), None)
}

/// M/M/1 retrial queue with a single aggregate retrial stream; a successful
/// retrial admits a uniformly chosen orbiting packet.
pub fn run_retrial(lambda: f64, theta: f64, mu: f64, cfg: &RunConfig, rng: RngStream) -> Result<RunOutput> {
    NodeModel::RetrialOrbit { mu, theta }.validate()?;
    cfg.validate()?;
    retrial(lambda, theta, mu, &AgeFeed::Zero, cfg, rng)
}

#[derive(Debug, Clone, Copy)]
struct Waiting {
    generation: f64,
    arrival: f64,
}

fn retrial(lambda: f64, theta: f64, mu: f64, feed: &AgeFeed, cfg: &RunConfig, mut rng: RngStream) -> Result<RunOutput> {
    positive("lambda", lambda)?;
    if !cfg.allow_unstable {
        crate::analytic::retrial_steady_state(lambda, theta, mu)?;
    }
    let mut ages = feed.sampler();
    let mut sink = Sink::new(cfg);
    let mut events = EventQueue::new();
    let mut orbit: Vec<Waiting> = Vec::new();
    let mut in_service: Option<(Waiting, f64)> = None;
    let mut occupancy = vec![[0.0; 2]; OCCUPANCY_LEVELS + 1];
    let mut overflow = 0.0;
    let mut observed = 0.0;
    let mut last_time = 0.0;
    let mut waits = 0.0;
    let mut via_orbit = 0u64;
    let mut counted = 0u64;

    events.schedule(rng.exponential(lambda), EventKind::Arrival);
    while let Some(ev) = events.pop() {
        let now = ev.time;
        if sink.obs.window_open() {
            let dt = now - last_time;
            observed += dt;
            let busy = usize::from(in_service.is_some());
            match occupancy.get_mut(orbit.len()) {
                Some(cell) => cell[busy] += dt,
                None => overflow += dt,
            }
        }
        last_time = now;
        match ev.kind {
            EventKind::Arrival => {
                let p = Waiting { generation: now - ages.next(&mut rng), arrival: now };
                if in_service.is_none() {
                    in_service = Some((p, now));
                    events.schedule(now + rng.exponential(mu), EventKind::Departure);
                } else {
                    orbit.push(p);
                    if orbit.len() == 1 {
                        events.schedule(now + rng.exponential(theta), EventKind::Retrial);
                    }
                }
                events.schedule(now + rng.exponential(lambda), EventKind::Arrival);
            }
            EventKind::Retrial => {
                if in_service.is_none() {
                    let p = orbit.swap_remove(rng.index(orbit.len()));
                    in_service = Some((p, now));
                    events.schedule(now + rng.exponential(mu), EventKind::Departure);
                }
                if !orbit.is_empty() {
                    events.schedule(now + rng.exponential(theta), EventKind::Retrial);
                }
            }
            EventKind::Departure => {
                let (p, start) = in_service.take().expect("departure without service");
                if sink.obs.window_open() {
                    counted += 1;
                    waits += start - p.arrival;
                    if start > p.arrival {
                        via_orbit += 1;
                    }
                }
                sink.push(
                    Delivery { generation: p.generation, arrival: start, service_start: start, departure: now },
                    || vec![p.arrival],
                );
                if sink.done() {
                    break;
                }
            }
        }
    }
    let norm = |x: f64| if observed > 0.0 { x / observed } else { f64::NAN };
    let occupancy: Vec<[f64; 2]> = occupancy.iter().map(|c| [norm(c[0]), norm(c[1])]).collect();
    let p_busy = occupancy.iter().map(|c| c[1]).sum::<f64>();
    let extras = RetrialExtras {
        p_busy,
        occupancy,
        overflow: norm(overflow),
        observed_time: observed,
        mean_orbit_wait: waits / counted.max(1) as f64,
        orbit_fraction: via_orbit as f64 / counted.max(1) as f64,
    };
    sink.finish(0, Vec::new(), Some(extras))
}

/// Runs `reps` independent replications, replication `i` on stream `i` of
/// `seed`. Results come back in stream order whether or not they ran in
/// parallel.
pub fn replicate<T, F>(reps: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(RngStream) -> T + Sync,
{
    replicate_streams(0, reps, seed, f)
}

/// Like [`replicate`] but on streams `first_stream..first_stream + reps`.
pub fn replicate_streams<T, F>(first_stream: u64, reps: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(RngStream) -> T + Sync,
{
    let stream = |i: usize| RngStream::new(seed, first_stream + i as u64);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..reps).into_par_iter().map(|i| f(stream(i))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..reps).map(|i| f(stream(i))).collect()
    }
}
