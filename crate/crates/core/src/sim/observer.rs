use serde::{Deserialize, Serialize};

use crate::stats;

/// Number of batches used for batch-means standard errors.
pub const BATCHES: usize = 20;

/// What the monitor sees at a departure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub generation: f64,
    pub arrival: f64,
    pub service_start: f64,
    pub departure: f64,
}

impl Delivery {
    pub fn initial_age(&self) -> f64 {
        self.arrival - self.generation
    }

    pub fn system_time(&self) -> f64 {
        self.departure - self.arrival
    }
}

/// Exact area under the age sawtooth, accumulated one delivery at a time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeAccumulator {
    pub last_generation_delivered: f64,
    pub last_departure: f64,
    pub accumulated_area: f64,
    pub delivered_count: u64,
    pub far_update_count: u64,
}

impl AgeAccumulator {
    /// Starts at a delivery of a packet generated at `generation`.
    pub fn new(departure: f64, generation: f64) -> Self {
        Self {
            last_generation_delivered: generation,
            last_departure: departure,
            accumulated_area: 0.0,
            delivered_count: 0,
            far_update_count: 0,
        }
    }

    pub fn age_at(&self, s: f64) -> f64 {
        s - self.last_generation_delivered
    }

    /// Adds the trapezoid `Y^2/2 + Y (t'_{n-1} - g_{n-1})` and resets the age
    /// to that of the delivered packet, which may raise it.
    pub fn deliver(&mut self, departure: f64, generation: f64) -> f64 {
        let y = departure - self.last_departure;
        let area = 0.5 * y * y + y * (self.last_departure - self.last_generation_delivered);
        if generation < self.last_generation_delivered {
            self.far_update_count += 1;
        }
        self.accumulated_area += area;
        self.last_departure = departure;
        self.last_generation_delivered = generation;
        self.delivered_count += 1;
        area
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    n: f64,
    area: f64,
    y: f64,
    y2: f64,
    a: f64,
    a2: f64,
    ya: f64,
    t: f64,
    yt: f64,
    far: f64,
}

impl Sums {
    fn add(&mut self, o: &Sums) {
        self.n += o.n;
        self.area += o.area;
        self.y += o.y;
        self.y2 += o.y2;
        self.a += o.a;
        self.a2 += o.a2;
        self.ya += o.ya;
        self.t += o.t;
        self.yt += o.yt;
        self.far += o.far;
    }

    fn estimates(&self) -> Fields {
        let n = self.n;
        let mean_y = self.y / n;
        let mean_a = self.a / n;
        let var_y = (self.y2 - n * mean_y * mean_y) / (n - 1.0);
        let var_a = ((self.a2 - n * mean_a * mean_a) / (n - 1.0)).max(0.0);
        let cov = (self.ya - n * mean_y * mean_a) / (n - 1.0);
        Fields {
            aaoi: self.area / self.y,
            effective_rate: n / self.y,
            cross_moment: self.ya / n,
            correlation: if var_a > 0.0 && var_y > 0.0 { cov / (var_a * var_y).sqrt() } else { f64::NAN },
            cv_interdeparture: var_y.max(0.0).sqrt() / mean_y,
            mean_initial_age: mean_a,
            sd_initial_age: var_a.sqrt(),
            mean_interdeparture: mean_y,
            second_moment_interdeparture: self.y2 / n,
            cross_yt: self.yt / n,
            mean_system_time: self.t / n,
            far_update_rate: self.far / n,
        }
    }
}

macro_rules! fields {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $f:ident),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
        pub struct $name {
            $($(#[$fm])* pub $f: f64,)*
        }

        impl $name {
            fn map(items: &[$name], g: impl Fn(&[f64]) -> f64) -> $name {
                $name {
                    $($f: g(&items.iter().map(|x| x.$f).collect::<Vec<_>>()),)*
                }
            }

            /// Field-wise mean, e.g. across replications.
            pub fn mean_of(items: &[$name]) -> $name {
                Self::map(items, crate::stats::mean)
            }
        }
    };
}

fields!(
    /// Point estimates (or their standard errors) of every per-run statistic.
    /// `Y` is the inter-departure time, `A` the initial age of the previous
    /// delivery and `T` its system time in the monitored node.
    Fields {
        /// Time-average age over the observation window.
        aaoi,
        effective_rate,
        /// `E[Y_n A_{n-1}]`.
        cross_moment,
        /// Pearson correlation of `Y_n` and `A_{n-1}`.
        correlation,
        cv_interdeparture,
        mean_initial_age,
        sd_initial_age,
        mean_interdeparture,
        second_moment_interdeparture,
        /// `E[Y_n T_{n-1}]`.
        cross_yt,
        mean_system_time,
        far_update_rate,
    }
);

/// Statistics of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub estimates: Fields,
    /// Batch-means standard errors.
    pub standard_errors: Fields,
    /// False when fewer than [`BATCHES`] samples were available.
    pub errors_reliable: bool,
    /// Inter-departure intervals inside the observation window.
    pub samples: u64,
    /// All departures, warm-up included.
    pub delivered: u64,
    /// Packets dropped by a blocking node or attempts lost to channel errors.
    pub blocked: u64,
    pub far_updates: u64,
    pub window_start: f64,
    pub window_end: f64,
    pub area: f64,
}

impl RunStatistics {
    pub fn aaoi(&self) -> f64 {
        self.estimates.aaoi
    }

    pub fn elapsed(&self) -> f64 {
        self.window_end - self.window_start
    }
}

/// Per-sample series kept on request, aligned by interval.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSamples {
    pub interdeparture: Vec<f64>,
    /// Inter-arrival time into the monitored node.
    pub interarrival: Vec<f64>,
    pub prev_initial_age: Vec<f64>,
    pub prev_system_time: Vec<f64>,
}

/// Streams deliveries into windowed statistics.
///
/// The window opens at delivery `max(warmup, 1)`; the delivery before it
/// serves as the reference point, so exactly `total - max(warmup, 1)`
/// intervals are observed and no partial area enters.
#[derive(Debug, Clone)]
pub struct Observer {
    reference: u64,
    seen: u64,
    n_samples: u64,
    prev: Option<Delivery>,
    acc: Option<AgeAccumulator>,
    window_start: f64,
    batches: Vec<Sums>,
    samples: Option<RunSamples>,
}

impl Observer {
    pub fn new(total: u64, warmup: u64, keep_samples: bool) -> Self {
        let reference = warmup.max(1) - 1;
        let n_samples = total.saturating_sub(reference + 1);
        let nb = (n_samples as usize).clamp(1, BATCHES);
        Self {
            reference,
            seen: 0,
            n_samples,
            prev: None,
            acc: None,
            window_start: f64::NAN,
            batches: vec![Sums::default(); nb],
            samples: keep_samples.then(RunSamples::default),
        }
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    /// True once the reference delivery has been seen.
    pub fn window_open(&self) -> bool {
        self.acc.is_some()
    }

    pub fn observe(&mut self, d: Delivery) {
        if let Some(acc) = self.acc.as_mut() {
            let prev = self.prev.expect("reference delivery");
            let i = self.seen - self.reference - 1;
            let y = d.departure - prev.departure;
            let far_before = acc.far_update_count;
            let area = acc.deliver(d.departure, d.generation);
            let a = prev.initial_age();
            let t = prev.system_time();
            let nb = self.batches.len() as u64;
            let b = ((i * nb) / self.n_samples.max(1)).min(nb - 1) as usize;
            let s = &mut self.batches[b];
            s.n += 1.0;
            s.area += area;
            s.y += y;
            s.y2 += y * y;
            s.a += a;
            s.a2 += a * a;
            s.ya += y * a;
            s.t += t;
            s.yt += y * t;
            s.far += (acc.far_update_count - far_before) as f64;
            if let Some(smp) = self.samples.as_mut() {
                smp.interdeparture.push(y);
                smp.interarrival.push(d.arrival - prev.arrival);
                smp.prev_initial_age.push(a);
                smp.prev_system_time.push(t);
            }
        } else if self.seen == self.reference {
            self.acc = Some(AgeAccumulator::new(d.departure, d.generation));
            self.window_start = d.departure;
        }
        self.prev = Some(d);
        self.seen += 1;
    }

    /// Final statistics; `None` if no interval was observed.
    pub fn finish(self, blocked: u64) -> Option<(RunStatistics, Option<RunSamples>)> {
        let acc = self.acc?;
        if acc.delivered_count == 0 {
            return None;
        }
        let mut total = Sums::default();
        let filled: Vec<Sums> = self.batches.iter().filter(|b| b.n > 0.0).copied().collect();
        for b in &filled {
            total.add(b);
        }
        let per_batch: Vec<Fields> = filled.iter().map(Sums::estimates).collect();
        let standard_errors = if per_batch.len() >= 2 {
            Fields::map(&per_batch, stats::std_error)
        } else {
            Fields::map(&per_batch, |_| f64::NAN)
        };
        let stats = RunStatistics {
            estimates: total.estimates(),
            standard_errors,
            errors_reliable: filled.len() >= BATCHES,
            samples: acc.delivered_count,
            delivered: self.seen,
            blocked,
            far_updates: acc.far_update_count,
            window_start: self.window_start,
            window_end: acc.last_departure,
            area: acc.accumulated_area,
        };
        Some((stats, self.samples))
    }
}
