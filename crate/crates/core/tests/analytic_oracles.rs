use aoi_lab::analytic::*;
use aoi_lab::stats;
use aoi_lab::stochastic::RngStream;
use proptest::prelude::*;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Stationary law of the constant-rate retrial chain, truncated at `levels`
/// orbit sizes and solved by Gauss-Seidel sweeps on the balance equations.
fn retrial_ctmc(lambda: f64, theta: f64, mu: f64, levels: usize) -> Vec<[f64; 2]> {
    let mut p = vec![[1.0 / (2 * levels) as f64; 2]; levels];
    for _ in 0..20_000 {
        for n in 0..levels {
            // Idle with n in orbit: entered from busy (n) by a completion.
            let out0 = lambda + if n > 0 { theta } else { 0.0 };
            p[n][0] = mu * p[n][1] / out0;
            // Busy with n in orbit: from idle (n) by an arrival, idle (n + 1)
            // by a retrial, busy (n - 1) by a blocked arrival.
            let mut inflow = lambda * p[n][0];
            if n + 1 < levels {
                inflow += theta * p[n + 1][0];
            }
            if n > 0 {
                inflow += lambda * p[n - 1][1];
            }
            let out1 = mu + if n + 1 < levels { lambda } else { 0.0 };
            p[n][1] = inflow / out1;
        }
        let total: f64 = p.iter().map(|x| x[0] + x[1]).sum();
        p.iter_mut().for_each(|x| {
            x[0] /= total;
            x[1] /= total;
        });
    }
    p
}

#[test]
fn retrial_steady_state_matches_truncated_chain() {
    for &(l, th, mu) in &[(1.0, 1.0, 4.0), (0.5, 2.0, 1.0), (1.0, 3.0, 2.0)] {
        let s = retrial_steady_state(l, th, mu).unwrap();
        let chain = retrial_ctmc(l, th, mu, 300);
        for (n, row) in chain.iter().enumerate().take(20) {
            for b in 0..2u8 {
                let d = (s.p(b, n as u32) - row[b as usize]).abs();
                assert!(d < 1e-10, "({l},{th},{mu}) state ({b},{n}): {d}");
            }
        }
        let mean: f64 = chain.iter().enumerate().map(|(n, x)| n as f64 * (x[0] + x[1])).sum();
        assert!((mean - s.mean_orbit()).abs() < 1e-9);
        let m = retrial_orbit_metrics(l, th, mu).unwrap();
        // Little's law on the orbit.
        assert!((m.l_orbit - l * m.w_orbit).abs() < 1e-12);
        assert!((m.l_orbit - mean).abs() < 1e-9);
    }
}

#[test]
fn retrial_reference_values() {
    assert!((retrial_aaoi(1.0, 1.0, 4.0).unwrap() - 1.208_333_333_333_333).abs() < 1e-12);
    assert!((aaoi_mm11_nonpreemptive(2.0, 4.0).unwrap() - 5.0 / 6.0).abs() < 1e-15);
    assert!((retrial_equivalent_zero_age_aaoi(1.0, 1.0, 4.0).unwrap() - 1.1125).abs() < 1e-12);
}

/// Two FCFS exponential servers in series fed by Poisson(lambda), simulated
/// directly with Lindley recursions.
struct TandemMc {
    aaoi: f64,
    cross: f64,
    cross_se: f64,
}

fn tandem_monte_carlo(lambda: f64, gamma: f64, mu: f64, n: usize, seed: u64) -> TandemMc {
    let mut rng = RngStream::new(seed, 0);
    let (mut t, mut d1, mut d2) = (0.0, 0.0, 0.0);
    let (mut prev_t, mut prev_d1, mut prev_d2) = (f64::NAN, f64::NAN, f64::NAN);
    let (mut area, mut span) = (0.0, 0.0);
    let mut cross = Vec::with_capacity(n);
    for i in 0..n + 10_000 {
        t += rng.exponential(lambda);
        d1 = f64::max(t, d1) + rng.exponential(gamma);
        d2 = f64::max(d1, d2) + rng.exponential(mu);
        if i >= 10_000 {
            let y = d2 - prev_d2;
            area += y * y / 2.0 + y * (prev_d2 - prev_t);
            span += y;
            cross.push(y * (prev_d1 - prev_t));
        }
        (prev_t, prev_d1, prev_d2) = (t, d1, d2);
    }
    let batches: Vec<f64> = cross.chunks(n / 20).map(stats::mean).collect();
    TandemMc { aaoi: area / span, cross: stats::mean(&cross), cross_se: stats::std_error(&batches) }
}

#[test]
fn tandem_two_against_direct_lindley() {
    for (i, &(l, g, mu)) in [(1.0, 2.0, 2.0), (1.0, 3.0, 1.5)].iter().enumerate() {
        let mc = tandem_monte_carlo(l, g, mu, 2_000_000, 100 + i as u64);
        let cm = tandem_cross_moment(l, g, mu).unwrap();
        assert!((mc.cross - cm).abs() < 4.0 * mc.cross_se, "({l},{g},{mu}) cross {} vs {cm}", mc.cross);
        let exact = aaoi_tandem_two(l, g, mu).unwrap();
        assert!((mc.aaoi / exact - 1.0).abs() < 0.01, "({l},{g},{mu}) aaoi {} vs {exact}", mc.aaoi);
    }
}

/// Bufferless exponential node of rate `gamma` feeding an FCFS node of rate
/// `mu`. Returns (E[Y], E[Y^2], E[Y T]) at the second node, `T` being the
/// previous packet's time there.
fn hetero_monte_carlo(lambda: f64, gamma: f64, mu: f64, n: usize, seed: u64) -> (f64, f64, f64) {
    let mut rng = RngStream::new(seed, 0);
    let (mut t, mut free, mut d2) = (0.0, 0.0, 0.0);
    let (mut prev_a2, mut prev_d2) = (f64::NAN, f64::NAN);
    let (mut sy, mut sy2, mut syt, mut k) = (0.0, 0.0, 0.0, 0usize);
    let mut delivered = 0;
    while k < n {
        t += rng.exponential(lambda);
        if t < free {
            continue;
        }
        let a2 = t + rng.exponential(gamma);
        free = a2;
        d2 = f64::max(a2, d2) + rng.exponential(mu);
        if delivered > 10_000 {
            let y = d2 - prev_d2;
            sy += y;
            sy2 += y * y;
            syt += y * (prev_d2 - prev_a2);
            k += 1;
        }
        delivered += 1;
        (prev_a2, prev_d2) = (a2, d2);
    }
    let nf = n as f64;
    (sy / nf, sy2 / nf, syt / nf)
}

#[test]
fn hem1_moments_against_direct_simulation() {
    let m = hem1_moments(1.0, 2.0, 3.0).unwrap();
    let (ey, ey2, eyt) = hetero_monte_carlo(1.0, 2.0, 3.0, 2_000_000, 7);
    assert!((ey / m.mean_y - 1.0).abs() < 0.005, "{ey} vs {}", m.mean_y);
    assert!((ey2 / m.second_moment_y - 1.0).abs() < 0.01, "{ey2} vs {}", m.second_moment_y);
    assert!((eyt / m.cross_yt - 1.0).abs() < 0.01, "{eyt} vs {}", m.cross_yt);
    // Frozen after the check above.
    assert!((m.cross_yt - 0.462_81).abs() < 1e-5);
}

#[test]
fn interdeparture_density_is_consistent() {
    for &(l, g, mu) in &[(1.0, 2.0, 3.0), (0.5, 1.0, 4.0), (2.0, 3.0, 2.5)] {
        let m = hem1_moments(l, g, mu).unwrap();
        let d = m.pdf_y;
        let hi = 80.0 / l.min(g).min(mu);
        assert!((simpson(|y| d.pdf(y), 0.0, hi, 40_000) - 1.0).abs() < 1e-9);
        assert!((simpson(|y| y * d.pdf(y), 0.0, hi, 40_000) - d.mean()).abs() < 1e-9);
        assert!((simpson(|y| y * y * d.pdf(y), 0.0, hi, 40_000) - d.second_moment()).abs() < 1e-8);
        // Departures of a stable queue match its admitted arrivals.
        assert!((d.mean() - (l + g) / (l * g)).abs() < 1e-12);
        assert!((d.cdf(1.0) - simpson(|y| d.pdf(y), 0.0, 1.0, 2_000)).abs() < 1e-10);
        // The zero-age AAoI equals its own renewal-reward form.
        let reward = (m.second_moment_y / 2.0 + m.cross_yt) / m.mean_y;
        assert!((reward - hem1_aaoi(l, g, mu).unwrap()).abs() < 1e-12);
    }
}

fn fixed_point_residual(l: f64, g: f64, mu: f64) -> f64 {
    let s = hem1_sigma(l, g, mu).unwrap();
    let x = mu * (1.0 - s);
    (s - l * g / ((l + x) * (g + x))).abs()
}

#[test]
fn sigma_solves_its_fixed_point() {
    let mut rng = RngStream::new(31, 0);
    for _ in 0..100 {
        let l = 0.1 + 3.0 * rng.uniform();
        let g = 0.1 + 3.0 * rng.uniform();
        let eff = l * g / (l + g);
        let mu = eff * (1.05 + 5.0 * rng.uniform());
        assert!(fixed_point_residual(l, g, mu) < 1e-12, "({l},{g},{mu})");
        let b = hem1_sigma_bisection(l, g, mu).unwrap();
        assert!((b - hem1_sigma(l, g, mu).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn limits_reduce_to_known_queues() {
    // An instantaneous first node passes Poisson arrivals straight through.
    let v = hem1_aaoi(1.0, 1e9, 2.0).unwrap();
    assert!((v - aaoi_mm1_fcfs(1.0, 2.0).unwrap()).abs() < 1e-6);
    // Without errors the zero-wait correction vanishes.
    assert_eq!(zw_aaoi(0.0, 1.3).unwrap(), zw_error_free_aaoi(1.3).unwrap());
}

#[test]
fn zero_wait_closed_form() {
    for alpha in [0.0, 0.3, 0.5, 0.9] {
        for mu in [0.5, 1.0, 3.0] {
            let v = zw_aaoi(alpha, mu).unwrap();
            assert!((v - 2.0 / (mu * (1.0 - alpha))).abs() < 1e-12 * v);
            let mix = zw_initial_age_mixture(alpha, mu).unwrap();
            let rate = mu * (1.0 - alpha);
            let exact_mean = 2.0 * alpha * (1.0 - alpha) / rate + 2.0 * alpha * alpha / rate;
            assert!((mix.mean() - exact_mean).abs() < 1e-12);
        }
    }
}

#[test]
fn published_tandem_bounds() {
    let b = tandem_chain_bounds(1.0, &[10.0, 2.0], 1.0 / 0.9).unwrap().interval;
    assert!((b.lower / 9.29 - 1.0).abs() < 0.005 && (b.upper / 11.31 - 1.0).abs() < 0.005);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tandem_correction_is_positive_and_bounded(l in 0.05f64..2.0, gf in 1.02f64..10.0, mf in 1.02f64..10.0) {
        let (g, mu) = (l * gf, l * mf);
        let corr = l * tandem_cross_moment(l, g, mu).unwrap();
        prop_assert!(corr > 0.0);
        let m = 1.0 / (g - l);
        prop_assert!(correction_bounds(m, m, 1.0).unwrap().contains(corr));
        prop_assert!(tandem_covariance(l, g, mu).unwrap() < 0.0);
        let total = aaoi_tandem_two(l, g, mu).unwrap();
        let combined = theorem1_combine(aaoi_mm1_fcfs(l, mu).unwrap(), l, tandem_cross_moment(l, g, mu).unwrap());
        prop_assert!((total - combined).abs() < 1e-9 * total);
        prop_assert!((total - aaoi_tandem_two(l, mu, g).unwrap()).abs() < 1e-9 * total);
    }

    #[test]
    fn zero_wait_correction_inside_bounds(alpha in 0.0f64..0.98, mu in 0.05f64..10.0) {
        let mix = zw_initial_age_mixture(alpha, mu).unwrap();
        let corr = zw_aaoi(alpha, mu).unwrap() - zw_error_free_aaoi(mu).unwrap();
        prop_assert!(corr >= -1e-12);
        let b = correction_bounds(mix.mean(), mix.std_dev(), 1.0).unwrap();
        let slack = 1e-9 * (1.0 + corr);
        prop_assert!(b.lower - slack <= corr && corr <= b.upper + slack);
        prop_assert!((b.width() - zw_bound_width(alpha, mu).unwrap()).abs() < 1e-9 * (1.0 + b.width()));
    }

    #[test]
    fn chain_interval_widens_with_more_queues(l in 0.1f64..1.0, extra in 1.1f64..5.0) {
        let g = l * extra;
        let a = tandem_chain_bounds(l, &[g], 2.0 * l).unwrap().interval;
        let b = tandem_chain_bounds(l, &[g, g], 2.0 * l).unwrap().interval;
        prop_assert!(b.width() > a.width());
        prop_assert!(b.lower > a.lower);
    }

    #[test]
    fn retrial_probabilities_sum_to_one(l in 0.1f64..2.0, th in 0.1f64..5.0, mf in 1.05f64..6.0) {
        let mu = mf * l * (l + th) / th;
        let s = retrial_steady_state(l, th, mu).unwrap();
        let total: f64 = (0..2_000).map(|n| s.p(0, n) + s.p(1, n)).sum();
        prop_assert!((total - 1.0).abs() < 1e-6);
        prop_assert!(retrial_aaoi(l, th, mu).unwrap() > 0.0);
    }
}
