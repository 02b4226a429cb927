//! Browser bindings for three small explorations: the zero-wait correction
//! and its bounds as the channel error rate varies, the AAoI interval of an
//! M/M/1 chain, and the age sawtooth of a short simulated run.
//!
//! Results cross the boundary as flat `Float64Array`s; each function
//! documents its stride.

use aoi_lab::analytic;
use aoi_lab::scenarios::{bounds_sweep_zero_wait, ScenarioSpec, SystemKind};
use aoi_lab::sim::{self, RunConfig};
use aoi_lab::stochastic::RngStream;
use wasm_bindgen::prelude::*;

fn js(e: aoi_lab::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `points` rows of `[alpha, correction, lb, ub, clamped_lb]` for
/// `alpha` evenly spaced over `[0, alpha_max]`.
pub fn zero_wait_rows(mu: f64, alpha_max: f64, points: usize) -> aoi_lab::Result<Vec<f64>> {
    let points = points.max(2);
    let grid: Vec<f64> = (0..points).map(|i| alpha_max * i as f64 / (points - 1) as f64).collect();
    Ok(bounds_sweep_zero_wait(mu, &grid)?
        .iter()
        .flat_map(|r| [r.alpha, r.correction, r.lb, r.ub, r.clamped_lb])
        .collect())
}

#[wasm_bindgen]
pub fn zero_wait_sweep(mu: f64, alpha_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    zero_wait_rows(mu, alpha_max, points).map_err(js)
}

/// `[delta0, lb, ub, heuristic, exact]` for a chain with service rates
/// `rates` (final queue last). `exact` is NaN beyond two queues.
pub fn chain_interval(lambda: f64, rates: &[f64]) -> aoi_lab::Result<Vec<f64>> {
    let (last, prior) =
        rates.split_last().ok_or_else(|| aoi_lab::Error::InvalidParameter("need at least one rate".into()))?;
    let b = analytic::tandem_chain_bounds(lambda, prior, *last)?;
    let exact = match prior {
        [] => b.delta0,
        [g] => analytic::aaoi_tandem_two(lambda, *g, *last)?,
        _ => f64::NAN,
    };
    Ok(vec![b.delta0, b.interval.lower, b.interval.upper, analytic::tandem_heuristic_estimate(&b.interval), exact])
}

#[wasm_bindgen]
pub fn tandem_interval(lambda: f64, rates: Vec<f64>) -> Result<Vec<f64>, JsError> {
    chain_interval(lambda, &rates).map_err(js)
}

/// Simulated AAoI of the chain over `departures` observed departures.
#[wasm_bindgen]
pub fn tandem_simulate(lambda: f64, rates: Vec<f64>, departures: u32, seed: u32) -> Result<f64, JsError> {
    let cfg = RunConfig::observed(departures.max(100) as u64, None);
    sim::run_tandem(&rates, lambda, &cfg, RngStream::new(seed as u64, 0)).map(|o| o.stats.aaoi()).map_err(js)
}

/// Sawtooth corners `[t, age, zero_age]` of the first `packets` deliveries.
/// `zero_age` is what the age would be had every packet been fresh on
/// arrival; both curves share their corner times.
#[allow(clippy::too_many_arguments)]
pub fn sawtooth_points(
    model: &str,
    lambda: f64,
    mu: f64,
    gamma: f64,
    theta: f64,
    alpha: f64,
    packets: u32,
    seed: u64,
) -> aoi_lab::Result<Vec<f64>> {
    let system = SystemKind::from_name(model)
        .ok_or_else(|| aoi_lab::Error::InvalidParameter(format!("unknown model '{model}'")))?;
    let params = [("lambda", lambda), ("mu", mu), ("gamma", gamma), ("theta", theta), ("alpha", alpha)];
    let spec = ScenarioSpec::new(model, system, &params).with_seed(seed);
    spec.validate()?;
    let cfg = RunConfig::observed(packets.max(2) as u64, Some(0)).with_log();
    let out = spec.simulate(&cfg, RngStream::new(seed, 0))?;
    let log = out.log.unwrap_or_default();
    let mut pts = Vec::with_capacity(6 * log.len());
    for (i, r) in log.iter().enumerate() {
        if i > 0 {
            let p = &log[i - 1];
            pts.extend([r.departure, r.departure - p.generation, r.departure - p.arrival]);
        }
        pts.extend([r.departure, r.departure - r.generation, r.departure - r.arrival]);
    }
    Ok(pts)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn age_sawtooth(
    model: &str,
    lambda: f64,
    mu: f64,
    gamma: f64,
    theta: f64,
    alpha: f64,
    packets: u32,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    sawtooth_points(model, lambda, mu, gamma, theta, alpha, packets, seed as u64).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_stride_and_endpoints() {
        let v = zero_wait_rows(1.0, 0.9, 10).unwrap();
        assert_eq!(v.len(), 50);
        assert_eq!(&v[..5], &[0.0; 5]);
        assert!((v[45] - 0.9).abs() < 1e-15);
        assert!(v.chunks(5).all(|r| r[2] <= r[1] && r[1] <= r[3] && r[4] >= 0.0));
    }

    #[test]
    fn interval_matches_core() {
        let v = chain_interval(1.0, &[10.0, 2.0, 1.0 / 0.9]).unwrap();
        assert!(v[1] < v[3] && v[3] < v[2]);
        assert!(v[4].is_nan());
        let two = chain_interval(1.0, &[2.0, 2.0]).unwrap();
        assert!((two[4] - analytic::aaoi_tandem_two(1.0, 2.0, 2.0).unwrap()).abs() < 1e-15);
        assert!(chain_interval(1.0, &[]).is_err());
        assert!(chain_interval(1.0, &[0.5, 2.0]).is_err());
    }

    #[test]
    fn sawtooth_is_well_formed() {
        let v = sawtooth_points("zero-wait", 0.0, 1.0, 0.0, 0.0, 0.5, 50, 7).unwrap();
        assert_eq!(v.len() % 3, 0);
        let pts: Vec<&[f64]> = v.chunks(3).collect();
        assert!(pts.windows(2).all(|w| w[1][0] >= w[0][0]));
        // Aged curve never sits below the fresh-arrival curve.
        assert!(pts.iter().all(|p| p[1] >= p[2] - 1e-12 && p[2] >= -1e-12));
        assert!(sawtooth_points("mm1", 2.0, 1.0, 0.0, 0.0, 0.0, 10, 1).is_err());
        assert!(sawtooth_points("nope", 1.0, 2.0, 0.0, 0.0, 0.0, 10, 1).is_err());
    }
}
